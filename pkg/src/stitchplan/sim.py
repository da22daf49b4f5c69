"""Genome decoding and day-by-day production simulation.

Genome layout for ``n`` orders (length ``4n``):

* Part A, ``[0, 2n)``: two line slots per order, real values rounded to a line id.
* Part B, ``[2n, 3n)``: split selector, quantized into four equal bins of
  ``[0.1, 0.9]`` giving split fractions 0.2/0.4/0.6/0.8.
* Part C, ``[3n, 4n)``: sequence key per order (random keys).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .domain import Dataset, DomainError, ProductionLine, curve_efficiency
from .noise import ZeroNoise

SPLIT_LEVELS = (0.2, 0.4, 0.6, 0.8)
SPLIT_LOW, SPLIT_HIGH = 0.1, 0.9


class GenomeError(ValueError):
    pass


class SimulationError(RuntimeError):
    pass


def genome_bounds(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-gene lower/upper bounds used for initialization and reflection."""
    n, m = dataset.n_orders, dataset.n_lines
    lo = np.concatenate([np.full(2 * n, 1.0), np.full(n, SPLIT_LOW), np.full(n, 1.0)])
    hi = np.concatenate([np.full(2 * n, float(m)), np.full(n, SPLIT_HIGH), np.full(n, float(max(n, 1)))])
    return lo, hi


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def split_fraction(selector: float) -> float:
    k = math.floor((selector - SPLIT_LOW) / 0.2)
    return SPLIT_LEVELS[min(max(k, 0), 3)]


def decode_line(value: float, type_id: int, dataset: Dataset) -> int:
    """Round-and-clamp to a line id, then repair onto an accepting line.

    Repair searches upward from the decoded id, wrapping around after line m.
    """
    m = dataset.n_lines
    line = min(max(round_half_up(value), 1), m)
    for step in range(m):
        cand = (line - 1 + step) % m + 1
        if dataset.line_by_id(cand).accepts(type_id):
            return cand
    raise SimulationError(f"no line accepts product type {type_id}")


@dataclass(frozen=True)
class SubOrder:
    order_id: int
    index: int  # 0 or 1
    line_id: int
    quantity: int
    key: float


@dataclass(frozen=True)
class AssignmentPlan:
    suborders: tuple[SubOrder, ...]
    split: dict = field(default_factory=dict)  # order id -> fraction or None

    def for_order(self, order_id: int) -> list[SubOrder]:
        return [s for s in self.suborders if s.order_id == order_id]


def decode_genome(genome, dataset: Dataset) -> AssignmentPlan:
    g = np.asarray(genome, dtype=float)
    n = dataset.n_orders
    if g.shape != (4 * n,):
        raise GenomeError(f"genome length {g.size} does not match 4n = {4 * n}")
    if not np.all(np.isfinite(g)):
        raise GenomeError("genome contains non-finite values")
    subs: list[SubOrder] = []
    split: dict[int, Optional[float]] = {}
    for j, order in enumerate(dataset.orders):
        l1 = decode_line(g[2 * j], order.product_type, dataset)
        l2 = decode_line(g[2 * j + 1], order.product_type, dataset)
        key = float(g[3 * n + j])
        if l1 == l2:
            subs.append(SubOrder(order.id, 0, l1, order.quantity, key))
            split[order.id] = None
            continue
        alpha = split_fraction(g[2 * n + j])
        q1 = round_half_up(alpha * order.quantity)
        if q1 <= 0 or q1 >= order.quantity:
            # degenerate split of a tiny order collapses onto one line
            line = l2 if q1 <= 0 else l1
            subs.append(SubOrder(order.id, 0, line, order.quantity, key))
            split[order.id] = None
            continue
        subs.append(SubOrder(order.id, 0, l1, q1, key))
        subs.append(SubOrder(order.id, 1, l2, order.quantity - q1, key))
        split[order.id] = alpha
    return AssignmentPlan(tuple(subs), split)


def sequence_line(plan: AssignmentPlan, line: ProductionLine | int) -> list[SubOrder]:
    line_id = line if isinstance(line, int) else line.id
    on_line = [s for s in plan.suborders if s.line_id == line_id]
    return sorted(on_line, key=lambda s: (s.key, s.order_id, s.index))


def daily_quantity(n_time: float, e_p: float, e_o: float, smv: float, noise: float = 0.0) -> float:
    """Pieces made in ``n_time`` minutes at line and learning efficiency, with noise."""
    if smv <= 0:
        raise DomainError(f"smv must be positive, got {smv}")
    return n_time * e_p * e_o / smv * (1.0 + noise)


@dataclass(frozen=True)
class SubOrderRun:
    order_id: int
    index: int
    line_id: int
    quantity: int
    a_day: int
    f_day: int
    daily_quantities: tuple[float, ...]
    efficiencies: tuple[float, ...] = ()

    @property
    def p_time(self) -> int:
        return self.f_day - self.a_day


@dataclass(frozen=True)
class Schedule:
    runs: tuple[SubOrderRun, ...]

    def for_order(self, order_id: int) -> list[SubOrderRun]:
        return [r for r in self.runs if r.order_id == order_id]

    def finish_day(self, order_id: int) -> int:
        return max(r.f_day for r in self.for_order(order_id))

    def start_day(self, order_id: int) -> int:
        return min(r.a_day for r in self.for_order(order_id))

    def order_ids(self) -> list[int]:
        return sorted({r.order_id for r in self.runs})

    def line_listing(self) -> dict[int, list[SubOrderRun]]:
        out: dict[int, list[SubOrderRun]] = {}
        for r in self.runs:
            out.setdefault(r.line_id, []).append(r)
        return dict(sorted(out.items()))

    def to_dict(self) -> dict:
        return {
            "suborders": [
                {
                    "order": r.order_id,
                    "suborder": r.index + 1,
                    "line": r.line_id,
                    "quantity": r.quantity,
                    "a_day": r.a_day,
                    "f_day": r.f_day,
                    "p_time": r.p_time,
                    "daily_quantities": list(r.daily_quantities),
                }
                for r in self.runs
            ]
        }

    def gantt_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["order", "suborder", "line", "start", "finish"])
        for r in sorted(self.runs, key=lambda r: (r.order_id, r.index)):
            w.writerow([r.order_id, r.index + 1, r.line_id, r.a_day, r.f_day])
        return buf.getvalue()


@dataclass
class LineCursor:
    """Production state of one line between sub-orders."""

    line_id: int
    capacity: float
    day: int = -1  # last day with production, -1 before the first order
    minutes_used_on_day: float = 0.0
    last_type: Optional[int] = None
    consecutive_type_days: int = 0


NoiseFn = Callable[[int, int, int, int, int], float]


def simulate_line(line: ProductionLine, subs: Sequence[SubOrder], dataset: Dataset,
                  noise: NoiseFn, p_day: int = 0) -> list[SubOrderRun]:
    cur = LineCursor(line.id, line.capacity_minutes_per_day, day=p_day - 1)
    cap = cur.capacity
    runs = []
    for sub in subs:
        order = dataset.orders[sub.order_id - 1]
        e_p = line.efficiency(order.product_type)
        if e_p <= 0:
            raise SimulationError(f"order {order.id} placed on line {line.id} which cannot make its type")
        curve = dataset.type_by_id(order.product_type).learning_curve

        same_type = cur.last_type == order.product_type
        if same_type and cur.minutes_used_on_day < cap:
            # continue on the partially used day at the same learning level
            day, n_time = cur.day, cap - cur.minutes_used_on_day
            u = cur.consecutive_type_days
        elif same_type:
            day, n_time = cur.day + 1, cap
            u = cur.consecutive_type_days + 1
        else:
            day, n_time = cur.day + 1, cap
            u = 1
        a_day = day

        q_sum = 0.0
        qs: list[float] = []
        effs: list[float] = []
        d = 1
        while True:
            e_o = curve_efficiency(curve, u)
            q = daily_quantity(n_time, e_p, e_o, order.smv, noise(line.id, day, sub.order_id, sub.index, d))
            qs.append(q)
            effs.append(e_o)
            if q_sum + q >= sub.quantity:
                remaining = sub.quantity - q_sum
                needed = remaining * order.smv / (e_p * e_o)
                cur.minutes_used_on_day = (cap - n_time) + min(n_time, needed)
                break
            q_sum += q
            day += 1
            d += 1
            u += 1
            n_time = cap
        cur.day = day
        cur.last_type = order.product_type
        cur.consecutive_type_days = u
        runs.append(SubOrderRun(sub.order_id, sub.index, line.id, sub.quantity, a_day, a_day + len(qs),
                                tuple(qs), tuple(effs)))
    return runs


def simulate(plan: AssignmentPlan, dataset: Dataset, noise: Optional[NoiseFn] = None) -> Schedule:
    """Run every line's sequenced sub-orders and collect start/finish days.

    ``noise(line_id, day, order_id, sub_index, d)`` returns the relative
    deviation for one production day; the default is noise-free.
    """
    noise = noise or ZeroNoise()
    runs: list[SubOrderRun] = []
    for line in dataset.lines:
        runs.extend(simulate_line(line, sequence_line(plan, line), dataset, noise, dataset.p_day))
    return Schedule(tuple(runs))


def format_line_listing(schedule: Schedule) -> str:
    """Per-line assignment listing, e.g. ``1  O6(400), O5(600)``."""
    rows = []
    for line_id, runs in schedule.line_listing().items():
        rows.append(f"{line_id:>3d}  " + ", ".join(f"O{r.order_id}({r.quantity})" for r in runs))
    return "\n".join(rows)
