"""Pareto dominance, fast nondominated sorting, crowding distance, elitist selection."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class MixedKindError(TypeError):
    """Deterministic and robust objective points were compared."""


def _as_array(points) -> np.ndarray:
    arr = np.asarray([tuple(p) for p in points] if not isinstance(points, np.ndarray) else points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 2) if arr.size else arr.reshape(0, 2)
    return arr


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse in every objective and better in one (minimization)."""
    ka, kb = getattr(a, "kind", None), getattr(b, "kind", None)
    if ka is not None and kb is not None and ka != kb:
        raise MixedKindError(f"cannot compare {ka} and {kb} objective points")
    a, b = tuple(a), tuple(b)
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when point i dominates point j."""
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def fast_nondominated_sort(points) -> list[list[int]]:
    """Partition indices into fronts F0, F1, ...; indices ascend within a front."""
    F = _as_array(points)
    if len(F) == 0:
        return []
    dom = dominance_matrix(F)
    count = dom.sum(axis=0).astype(np.int64)
    remaining = np.ones(len(F), dtype=bool)
    fronts = []
    while remaining.any():
        current = np.flatnonzero(remaining & (count == 0))
        fronts.append(current.tolist())
        remaining[current] = False
        count -= dom[current].sum(axis=0)
    return fronts


def crowding_distance(front_points) -> np.ndarray:
    F = _as_array(front_points)
    k = len(F)
    dist = np.zeros(k)
    if k == 0:
        return dist
    if k <= 2:
        dist[:] = np.inf
        return dist
    for obj in range(F.shape[1]):
        order = np.argsort(F[:, obj], kind="stable")
        vals = F[order, obj]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span == 0:
            continue
        dist[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return dist


def rank_and_crowding(points) -> tuple[np.ndarray, np.ndarray, list[list[int]]]:
    F = _as_array(points)
    fronts = fast_nondominated_sort(F)
    rank = np.empty(len(F), dtype=np.int64)
    crowd = np.empty(len(F))
    for r, fr in enumerate(fronts):
        rank[fr] = r
        crowd[fr] = crowding_distance(F[fr])
    return rank, crowd, fronts


def crowded_order(rank: np.ndarray, crowd: np.ndarray) -> np.ndarray:
    """Indices best-first by (rank asc, crowding desc, index asc)."""
    idx = np.arange(len(rank))
    return np.lexsort((idx, -crowd, rank))


def fill_by_fronts(fronts: Sequence[Sequence[int]], crowd, n_select: int) -> list[int]:
    """Take whole fronts while they fit, then the most crowded-apart of the next one."""
    chosen: list[int] = []
    for fr in fronts:
        if len(chosen) + len(fr) <= n_select:
            chosen.extend(fr)
            if len(chosen) == n_select:
                break
            continue
        need = n_select - len(chosen)
        ranked = sorted(fr, key=lambda i: (-crowd[i], i))
        chosen.extend(ranked[:need])
        break
    return chosen


def select_next_generation(points, n_select: int) -> np.ndarray:
    """Elitist environmental selection of ``n_select`` indices from the pool."""
    F = _as_array(points)
    if n_select > len(F):
        raise ValueError(f"cannot select {n_select} from a pool of {len(F)}")
    _, crowd, fronts = rank_and_crowding(F)
    return np.array(fill_by_fronts(fronts, crowd, n_select), dtype=np.int64)


def nondominated_unique(points) -> np.ndarray:
    """Front 0 of the points with duplicate objective vectors collapsed, sorted by f1."""
    F = _as_array(points)
    if len(F) == 0:
        return F
    F = np.unique(F, axis=0)
    front = fast_nondominated_sort(F)[0]
    out = F[front]
    return out[np.lexsort(out.T[::-1])]


def aggregate_pareto(runs: Iterable) -> np.ndarray:
    """Combined nondominated set over the final objective points of several runs."""
    arrays = [_as_array(getattr(r, "objectives", r)) for r in runs]
    if not arrays:
        raise ValueError("aggregate_pareto needs at least one run")
    return nondominated_unique(np.vstack(arrays))
