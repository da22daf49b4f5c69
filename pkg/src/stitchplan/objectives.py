"""Conservative start days, tardiness/clash objectives and robust (mean-effective) evaluation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import Dataset, Order
from .kernel import evaluate_packed, pack
from .noise import ORDER_DAY, CounterNoise, ZeroNoise
from .sim import Schedule, decode_genome, simulate

DETERMINISTIC = "deterministic"
ROBUST = "robust"


@dataclass(frozen=True)
class ObjectivePoint:
    f1: float
    f2: float
    kind: str = DETERMINISTIC
    h_samples: Optional[int] = None
    beta: Optional[float] = None

    def __iter__(self):
        return iter((self.f1, self.f2))

    def as_tuple(self) -> tuple[float, float]:
        return (self.f1, self.f2)


def conservative_start(order: Order, s_day: int, p_day: int = 0) -> int:
    """Earliest safe start: driven by the unfinished event with the largest offset."""
    open_offsets = [abs(ev.offset_days) for ev in order.events if not ev.finished]
    worst = max(open_offsets, default=0)
    lead = p_day - s_day
    if worst > lead:
        return p_day + worst - lead
    return p_day


def conservative_starts(dataset: Dataset) -> dict[int, int]:
    return {o.id: conservative_start(o, dataset.s_day, dataset.p_day) for o in dataset.orders}


def h(x: float) -> float:
    return -x if x < 0 else 0


def total_tardiness(schedule: Schedule, dataset: Dataset) -> float:
    return sum(h(o.due_day - schedule.finish_day(o.id)) for o in dataset.orders)


def total_clashes(schedule: Schedule, starts: dict[int, int]) -> float:
    return sum(h(schedule.start_day(oid) - c) for oid, c in starts.items())


def evaluate_schedule(schedule: Schedule, dataset: Dataset, starts: Optional[dict] = None) -> tuple[float, float]:
    starts = conservative_starts(dataset) if starts is None else starts
    return float(total_tardiness(schedule, dataset)), float(total_clashes(schedule, starts))


def deterministic_objectives(genome, dataset: Dataset) -> ObjectivePoint:
    sched = simulate(decode_genome(genome, dataset), dataset, ZeroNoise())
    return ObjectivePoint(*evaluate_schedule(sched, dataset))


def robust_objectives(genome, dataset: Dataset, h_samples: int, beta: float, rng_seed: int,
                      noise_scope: str = ORDER_DAY) -> ObjectivePoint:
    """Mean of (f1, f2) over ``h_samples`` noisy simulations of one decoded plan.

    Sample ``k`` draws its noise from the counter stream ``(rng_seed, k, ...)``,
    so the result does not depend on evaluation order.
    """
    if h_samples < 1:
        raise ValueError("h_samples must be >= 1")
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    plan = decode_genome(genome, dataset)
    starts = conservative_starts(dataset)
    vals = np.array([
        evaluate_schedule(simulate(plan, dataset, CounterNoise(beta, rng_seed, k, noise_scope)), dataset, starts)
        for k in range(h_samples)
    ])
    f1, f2 = vals.mean(axis=0)
    return ObjectivePoint(float(f1), float(f2), ROBUST, h_samples, beta)


class Evaluator:
    """Batch evaluator over the compiled kernel, bound to one dataset scenario.

    ``jobs > 1`` splits a batch across worker processes; each row's result
    depends only on its genome and seed, so the split never changes output.
    """

    def __init__(self, dataset: Dataset, h_samples: int = 1, beta: float = 0.0,
                 noise_scope: str = ORDER_DAY, jobs: int = 1):
        if h_samples < 1:
            raise ValueError("h_samples must be >= 1")
        self.dataset = dataset
        self.h_samples = int(h_samples)
        self.beta = float(beta)
        self.noise_scope = noise_scope
        self.jobs = max(1, int(jobs))
        starts = conservative_starts(dataset)
        self.packed = pack(dataset, [starts[o.id] for o in dataset.orders])

    def __call__(self, genomes, seeds) -> np.ndarray:
        genomes = np.atleast_2d(np.asarray(genomes, dtype=float))
        seeds = np.broadcast_to(np.asarray(seeds, dtype=object), (genomes.shape[0],))
        if self.jobs == 1 or genomes.shape[0] < 2 * self.jobs:
            return self._run(genomes, seeds)
        chunks = np.array_split(np.arange(genomes.shape[0]), self.jobs)
        with ProcessPoolExecutor(max_workers=self.jobs) as ex:
            parts = list(ex.map(_eval_chunk, [
                (self.packed, genomes[c], list(seeds[c]), self.h_samples, self.beta, self.noise_scope)
                for c in chunks
            ]))
        return np.vstack(parts)

    def _run(self, genomes, seeds):
        return evaluate_packed(self.packed, genomes, list(seeds), self.h_samples, self.beta, self.noise_scope)

    def point(self, genome, seed: int = 0) -> ObjectivePoint:
        f1, f2 = self(genome, [seed])[0]
        if self.beta == 0.0 and self.h_samples == 1:
            return ObjectivePoint(float(f1), float(f2))
        return ObjectivePoint(float(f1), float(f2), ROBUST, self.h_samples, self.beta)


def _eval_chunk(args):
    packed, genomes, seeds, h_samples, beta, scope = args
    return evaluate_packed(packed, genomes, seeds, h_samples, beta, scope)


def evaluate_population(genomes, dataset: Dataset, seeds: Sequence[int], h_samples: int = 1,
                        beta: float = 0.0, noise_scope: str = ORDER_DAY, jobs: int = 1) -> np.ndarray:
    return Evaluator(dataset, h_samples, beta, noise_scope, jobs)(genomes, seeds)
