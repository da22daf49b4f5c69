"""NSGA-II variation: crowded binary tournament, SBX and polynomial mutation."""

from __future__ import annotations

import numpy as np

from .jade import reflect


def tournament(rank: np.ndarray, crowd: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    a = rng.integers(0, len(rank), size)
    b = rng.integers(0, len(rank), size)
    a_better = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] > crowd[b]))
    b_better = (rank[b] < rank[a]) | ((rank[a] == rank[b]) & (crowd[b] > crowd[a]))
    coin = rng.random(size) < 0.5
    return np.where(a_better, a, np.where(b_better, b, np.where(coin, a, b)))


def sbx(p1: np.ndarray, p2: np.ndarray, rng: np.random.Generator, eta: float = 20.0,
        pc: float = 0.9) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover on row-paired parents (each gene swapped with prob. 0.5)."""
    n, dim = p1.shape
    u = rng.random((n, dim))
    bq = np.where(u <= 0.5, (2 * u) ** (1 / (eta + 1)), (1 / (2 * (1 - u))) ** (1 / (eta + 1)))
    c1 = 0.5 * ((1 + bq) * p1 + (1 - bq) * p2)
    c2 = 0.5 * ((1 - bq) * p1 + (1 + bq) * p2)
    gene = rng.random((n, dim)) < 0.5
    pair = (rng.random(n) < pc)[:, None]
    do = gene & pair
    return np.where(do, c1, p1), np.where(do, c2, p2)


def polynomial_mutation(x: np.ndarray, lo: np.ndarray, hi: np.ndarray, rng: np.random.Generator,
                        eta: float = 20.0, pm: float | None = None) -> np.ndarray:
    n, dim = x.shape
    pm = 1.0 / dim if pm is None else pm
    u = rng.random((n, dim))
    delta = np.where(u < 0.5, (2 * u) ** (1 / (eta + 1)) - 1, 1 - (2 * (1 - u)) ** (1 / (eta + 1)))
    mutate = rng.random((n, dim)) < pm
    return reflect(np.where(mutate, x + delta * (hi - lo), x), lo, hi)


def nsga2_offspring(X, rank, crowd, lo, hi, rng, eta_c=20.0, eta_m=2.0, pc=0.9, pm=None) -> np.ndarray:
    n = len(X)
    half = (n + 1) // 2
    i1 = tournament(rank, crowd, rng, half)
    i2 = tournament(rank, crowd, rng, half)
    c1, c2 = sbx(X[i1], X[i2], rng, eta_c, pc)
    kids = np.vstack([c1, c2])[:n]
    return polynomial_mutation(reflect(kids, lo, hi), lo, hi, rng, eta_m, pm)
