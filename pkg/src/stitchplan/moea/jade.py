"""JADE operators: DE/current-to-pbest/1 with an external archive and adaptive F/CR."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class JadeState:
    mu_cr: float = 0.5
    mu_f: float = 0.5
    c: float = 0.1
    p: float = 0.05
    archive: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    capacity: int = 0

    def n_pbest(self, pop_size: int) -> int:
        return max(1, math.ceil(self.p * pop_size))


def reflect(values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Fold out-of-range values back into ``[lo, hi]`` by mirror reflection."""
    values = np.asarray(values, dtype=float)
    width = hi - lo
    out = np.array(values, copy=True)
    ok = width > 0
    period = 2.0 * width[ok]
    y = np.mod(values[..., ok] - lo[ok], period)
    y = np.where(y > width[ok], period - y, y)
    out[..., ok] = lo[ok] + y
    out[..., ~ok] = lo[~ok]
    return out


def sample_f(mu_f: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Cauchy(mu_f, 0.1), redrawn while <= 0 and truncated at 1."""
    f = mu_f + 0.1 * rng.standard_cauchy(size)
    bad = f <= 0
    while bad.any():
        f[bad] = mu_f + 0.1 * rng.standard_cauchy(int(bad.sum()))
        bad = f <= 0
    return np.minimum(f, 1.0)


def sample_cr(mu_cr: float, rng: np.random.Generator, size: int) -> np.ndarray:
    return np.clip(rng.normal(mu_cr, 0.1, size), 0.0, 1.0)


def _pick_distinct(rng, upper: int, exclude: np.ndarray) -> np.ndarray:
    """One index in ``[0, upper)`` per row, avoiding every column of ``exclude``."""
    out = rng.integers(0, upper, size=exclude.shape[0])
    clash = (out[:, None] == exclude).any(axis=1)
    while clash.any():
        out[clash] = rng.integers(0, upper, size=int(clash.sum()))
        clash = (out[:, None] == exclude).any(axis=1)
    return out


def current_to_pbest(X: np.ndarray, ranking: np.ndarray, state: JadeState, rng: np.random.Generator,
                     lo: np.ndarray, hi: np.ndarray, targets: Optional[np.ndarray] = None,
                     f: Optional[np.ndarray] = None, cr: Optional[np.ndarray] = None):
    """Build trial vectors for ``targets`` (default: every row of ``X``).

    ``ranking`` lists population indices best first; the pbest donor is drawn
    from its first ``ceil(p * NP)`` entries. Returns ``(trials, f, cr)``.
    """
    n_pop, dim = X.shape
    if n_pop < 4:
        raise ValueError("JADE needs a population of at least 4")
    targets = np.arange(n_pop) if targets is None else np.asarray(targets)
    k = len(targets)
    f = sample_f(state.mu_f, rng, k) if f is None else np.broadcast_to(np.asarray(f, float), (k,)).copy()
    cr = sample_cr(state.mu_cr, rng, k) if cr is None else np.broadcast_to(np.asarray(cr, float), (k,)).copy()

    top = ranking[: state.n_pbest(n_pop)]
    pbest = top[rng.integers(0, len(top), size=k)]
    r1 = _pick_distinct(rng, n_pop, targets[:, None])
    archive = state.archive if state.archive.size else np.empty((0, dim))
    union = np.vstack([X, archive])
    r2 = _pick_distinct(rng, len(union), np.column_stack([targets, r1]))

    xi = X[targets]
    donor = xi + f[:, None] * (X[pbest] - xi) + f[:, None] * (X[r1] - union[r2])
    mask = rng.random((k, dim)) < cr[:, None]
    mask[np.arange(k), rng.integers(0, dim, size=k)] = True
    trials = np.where(mask, donor, xi)
    return reflect(trials, lo, hi), f, cr


def jade_trial(target_index: int, population: np.ndarray, state: JadeState, rng: np.random.Generator,
               lo: np.ndarray, hi: np.ndarray, ranking: Optional[np.ndarray] = None,
               f: Optional[float] = None, cr: Optional[float] = None):
    """Single-target version of :func:`current_to_pbest`; returns ``(trial, f, cr)``."""
    ranking = np.arange(len(population)) if ranking is None else np.asarray(ranking)
    trials, fs, crs = current_to_pbest(population, ranking, state, rng, lo, hi,
                                       targets=np.array([target_index]), f=f, cr=cr)
    return trials[0], float(fs[0]), float(crs[0])


def lehmer_mean(values: Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    return float((v * v).sum() / v.sum())


def update_jade_state(state: JadeState, successes: Sequence[tuple[float, float]]) -> JadeState:
    """Move mu_cr toward the mean successful CR and mu_f toward the Lehmer mean of successful F."""
    if len(successes) == 0:
        return state
    fs = [s[0] for s in successes]
    crs = [s[1] for s in successes]
    mu_cr = (1 - state.c) * state.mu_cr + state.c * float(np.mean(crs))
    mu_f = (1 - state.c) * state.mu_f + state.c * lehmer_mean(fs)
    return replace(state, mu_cr=min(max(mu_cr, 0.0), 1.0), mu_f=min(max(mu_f, np.finfo(float).tiny), 1.0))


def archive_add(state: JadeState, genomes: np.ndarray, rng: np.random.Generator) -> JadeState:
    """Append replaced parents; evict random members beyond capacity."""
    genomes = np.atleast_2d(genomes)
    if genomes.size == 0:
        return state
    arch = genomes if state.archive.size == 0 else np.vstack([state.archive, genomes])
    if len(arch) > state.capacity:
        keep = np.sort(rng.choice(len(arch), size=state.capacity, replace=False))
        arch = arch[keep]
    return replace(state, archive=arch)
