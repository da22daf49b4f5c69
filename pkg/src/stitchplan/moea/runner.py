"""Generation loops for NSJADE, NSGA-II and single-objective JADE."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from ..domain import Dataset, accepting_lines
from ..noise import M64, ORDER_DAY, splitmix64
from ..objectives import Evaluator
from ..sim import SPLIT_LEVELS, genome_bounds
from .jade import JadeState, archive_add, current_to_pbest, update_jade_state
from .nsga2 import nsga2_offspring
from .pareto import crowded_order, dominance_matrix, rank_and_crowding, select_next_generation

log = logging.getLogger(__name__)

ALGORITHMS = ("nsjade", "nsga2", "jade_single")


@dataclass
class RunConfig:
    np: int = 400
    xi: int = 10
    g_max: Optional[int] = None  # None -> D * xi
    h_samples: int = 5
    beta: float = 0.2
    seed: int = 0
    algorithm: str = "nsjade"
    s_day: Optional[int] = -7
    noise_scope: str = ORDER_DAY
    jobs: int = 1
    # JADE
    c: float = 0.1
    p: float = 0.05
    # NSGA-II
    eta_c: float = 20.0
    eta_m: float = 2.0  # wide steps: decoded genes only change across rounding boundaries
    pc: float = 0.9

    def __post_init__(self):
        if self.np <= 4:
            raise ValueError("population size must exceed 4")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.h_samples < 1:
            raise ValueError("h_samples must be >= 1")
        if self.g_max is not None and self.g_max < 0:
            raise ValueError("g_max must be >= 0")

    def generations(self, dim: int) -> int:
        return self.xi * dim if self.g_max is None else self.g_max

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    config: RunConfig
    genomes: np.ndarray
    objectives: np.ndarray
    ranks: np.ndarray
    crowding: np.ndarray
    stats: list = field(default_factory=list)

    def front(self) -> np.ndarray:
        return self.objectives[self.ranks == 0]

    @property
    def best_curve(self) -> list[float]:
        return [s["best_f1"] for s in self.stats]


def derive_seed(*parts: int) -> int:
    """Counter-style 64-bit seed from integer parts (run seed, generation, index)."""
    h = 0
    for p in parts:
        h = splitmix64(h ^ (int(p) & M64))
    return h


def _rng(*parts: int) -> np.random.Generator:
    return np.random.default_rng([int(p) & M64 for p in parts])


def _scenario(dataset: Dataset, config: RunConfig) -> Dataset:
    if config.s_day is not None and config.s_day != dataset.s_day:
        return dataset.at_s_day(config.s_day)
    return dataset


def initial_population(dataset: Dataset, size: int, rng: np.random.Generator) -> np.ndarray:
    """Part A over accepting lines, Part B on the four split levels, Part C integer keys in [1, n]."""
    n = dataset.n_orders
    X = np.empty((size, 4 * n))
    for j, order in enumerate(dataset.orders):
        ok = np.array(accepting_lines(dataset, order.product_type), dtype=float)
        X[:, 2 * j] = rng.choice(ok, size)
        X[:, 2 * j + 1] = rng.choice(ok, size)
    X[:, 2 * n: 3 * n] = rng.choice(np.array(SPLIT_LEVELS), (size, n))
    X[:, 3 * n:] = rng.integers(1, n + 1, (size, n))
    return X


def _eval_seeds(seed: int, gen: int, count: int) -> list[int]:
    return [derive_seed(seed, gen, i) for i in range(count)]


def _gen_stats(gen: int, F: np.ndarray, rank: np.ndarray, state: Optional[JadeState]) -> dict:
    return {
        "generation": gen,
        "best_f1": float(F[:, 0].min()),
        "best_f2": float(F[:, 1].min()),
        "mean_f1": float(F[:, 0].mean()),
        "mean_f2": float(F[:, 1].mean()),
        "front0_size": int((rank == 0).sum()),
        "mu_f": float(state.mu_f) if state is not None else float("nan"),
        "mu_cr": float(state.mu_cr) if state is not None else float("nan"),
    }


def run_nsjade(config: RunConfig, dataset: Dataset) -> RunResult:
    return _run_multiobjective(config, dataset, "nsjade")


def run_nsga2(config: RunConfig, dataset: Dataset) -> RunResult:
    return _run_multiobjective(config, dataset, "nsga2")


def _run_multiobjective(config: RunConfig, dataset: Dataset, variant: str) -> RunResult:
    ds = _scenario(dataset, config)
    lo, hi = genome_bounds(ds)
    dim = len(lo)
    g_max = config.generations(dim)
    evaluate = Evaluator(ds, config.h_samples, config.beta, config.noise_scope, config.jobs)
    seed = config.seed

    X = initial_population(ds, config.np, _rng(seed, 0))
    F = evaluate(X, _eval_seeds(seed, 0, config.np))
    rank, crowd, _ = rank_and_crowding(F)
    state = JadeState(c=config.c, p=config.p, archive=np.empty((0, dim)), capacity=config.np)
    stats = [_gen_stats(0, F, rank, state if variant == "nsjade" else None)]

    for gen in range(1, g_max + 1):
        rng = _rng(seed, gen)
        if variant == "nsjade":
            ranking = crowded_order(rank, crowd)
            U, fs, crs = current_to_pbest(X, ranking, state, rng, lo, hi)
        else:
            U = nsga2_offspring(X, rank, crowd, lo, hi, rng, config.eta_c, config.eta_m, config.pc)
        FU = evaluate(U, _eval_seeds(seed, gen, config.np))

        pool_X = np.vstack([X, U])
        pool_F = np.vstack([F, FU])
        keep = select_next_generation(pool_F, config.np)

        if variant == "nsjade":
            win = np.all(FU <= F, axis=1) & np.any(FU < F, axis=1)
            state = update_jade_state(state, list(zip(fs[win], crs[win])))
            survived = np.zeros(2 * config.np, dtype=bool)
            survived[keep] = True
            state = archive_add(state, X[~survived[: config.np]], rng)

        X, F = pool_X[keep], pool_F[keep]
        rank, crowd, _ = rank_and_crowding(F)
        stats.append(_gen_stats(gen, F, rank, state if variant == "nsjade" else None))
        if gen % 100 == 0:
            log.info("%s seed=%d gen=%d best=(%.2f, %.2f) front0=%d", variant, seed, gen,
                     stats[-1]["best_f1"], stats[-1]["best_f2"], stats[-1]["front0_size"])

    return RunResult(replace(config, algorithm=variant), X, F, rank, crowd, stats)


def run_jade_single(config: RunConfig, dataset: Dataset, target: Optional[float] = None) -> RunResult:
    """Scalar JADE on total tardiness with one-to-one parent/trial replacement.

    ``target`` ends the run early once the best fitness reaches it; the
    recorded curve then stops at that generation.
    """
    ds = _scenario(dataset, config)
    lo, hi = genome_bounds(ds)
    dim = len(lo)
    g_max = config.generations(dim)
    evaluate = Evaluator(ds, config.h_samples, config.beta, config.noise_scope, config.jobs)
    seed = config.seed

    X = initial_population(ds, config.np, _rng(seed, 0))
    F = evaluate(X, _eval_seeds(seed, 0, config.np))
    state = JadeState(c=config.c, p=config.p, archive=np.empty((0, dim)), capacity=config.np)
    stats = [_gen_stats(0, F, np.zeros(len(F), dtype=np.int64), state)]

    for gen in range(1, g_max + 1):
        if target is not None and F[:, 0].min() <= target:
            break
        rng = _rng(seed, gen)
        ranking = np.argsort(F[:, 0], kind="stable")
        U, fs, crs = current_to_pbest(X, ranking, state, rng, lo, hi)
        FU = evaluate(U, _eval_seeds(seed, gen, config.np))
        better = FU[:, 0] < F[:, 0]
        replace_mask = FU[:, 0] <= F[:, 0]
        state = update_jade_state(state, list(zip(fs[better], crs[better])))
        state = archive_add(state, X[replace_mask], rng)
        X = np.where(replace_mask[:, None], U, X)
        F = np.where(replace_mask[:, None], FU, F)
        stats.append(_gen_stats(gen, F, np.zeros(len(F), dtype=np.int64), state))

    order = np.argsort(F[:, 0], kind="stable")
    X, F = X[order], F[order]
    rank = np.zeros(len(F), dtype=np.int64)
    crowd = np.zeros(len(F))
    return RunResult(replace(config, algorithm="jade_single"), X, F, rank, crowd, stats)


def run(config: RunConfig, dataset: Dataset) -> RunResult:
    if config.algorithm == "nsjade":
        return run_nsjade(config, dataset)
    if config.algorithm == "nsga2":
        return run_nsga2(config, dataset)
    return run_jade_single(config, dataset)


def final_dominated_by_initial(result: RunResult, initial_F: np.ndarray) -> bool:
    """True if any final front point is dominated by some initial point."""
    dom = dominance_matrix(np.vstack([initial_F, result.front()]))
    k = len(initial_F)
    return bool(dom[:k, k:].any())
