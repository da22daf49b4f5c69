"""Robust multi-line order scheduling with order splitting, learning curves and noisy daily output."""

from .domain import Dataset, LearningCurve, curve_efficiency, validate_dataset
from .io import load_dataset
from .objectives import ObjectivePoint, conservative_start, robust_objectives
from .sim import decode_genome, simulate

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "LearningCurve",
    "ObjectivePoint",
    "conservative_start",
    "curve_efficiency",
    "decode_genome",
    "load_dataset",
    "robust_objectives",
    "simulate",
    "validate_dataset",
]
