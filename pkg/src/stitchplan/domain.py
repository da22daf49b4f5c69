"""Problem-instance model: product types, learning curves, lines, orders, events."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

P_DAY = 0


class DomainError(ValueError):
    """Raised for out-of-domain arguments (e.g. a learning-curve day < 1)."""


@dataclass(frozen=True)
class LearningCurve:
    """Piecewise-constant efficiency as a function of consecutive same-type days.

    ``breakpoints`` is a sequence of ``(day, efficiency)`` pairs with strictly
    increasing days. Looking up day ``u`` returns the efficiency of the last
    breakpoint whose day is ``<= u``; days past the table saturate.
    """

    breakpoints: tuple[tuple[int, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "breakpoints", tuple((int(d), float(e)) for d, e in self.breakpoints)
        )

    @property
    def days(self) -> list[int]:
        return [d for d, _ in self.breakpoints]

    @property
    def saturation_efficiency(self) -> float:
        return self.breakpoints[-1][1]

    @classmethod
    def flat(cls, efficiency: float = 1.0) -> "LearningCurve":
        return cls(((1, efficiency),))


def curve_efficiency(curve: LearningCurve, consecutive_day: int) -> float:
    if consecutive_day < 1:
        raise DomainError(f"consecutive_day must be >= 1, got {consecutive_day}")
    idx = bisect.bisect_right(curve.days, consecutive_day) - 1
    return curve.breakpoints[max(idx, 0)][1]


@dataclass(frozen=True)
class ProductType:
    id: int
    name: str
    learning_curve: LearningCurve


@dataclass(frozen=True)
class ProductionLine:
    id: int
    efficiency_by_type: Mapping[int, float]
    capacity_minutes_per_day: float

    def efficiency(self, type_id: int) -> float:
        return self.efficiency_by_type.get(type_id, 0.0)

    def accepts(self, type_id: int) -> bool:
        return self.efficiency(type_id) > 0.0


@dataclass(frozen=True)
class PreProductionEvent:
    """One timetable entry of an order.

    ``finished`` is the progress flag for the scenario currently selected on
    the dataset. ``progress`` keeps the per-``s_day`` snapshots from the data
    file so other scenarios can be re-selected later.
    """

    name: str
    offset_days: int
    finished: bool = False
    progress: Mapping[int, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Order:
    id: int
    product_type: int
    quantity: int
    due_day: int
    smv: float
    events: tuple[PreProductionEvent, ...] = ()


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class Dataset:
    lines: tuple[ProductionLine, ...]
    orders: tuple[Order, ...]
    types: tuple[ProductType, ...]
    s_day: int
    p_day: int = P_DAY
    name: str = ""

    @property
    def n_orders(self) -> int:
        return len(self.orders)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def genome_length(self) -> int:
        return 4 * len(self.orders)

    def type_by_id(self, type_id: int) -> ProductType:
        for t in self.types:
            if t.id == type_id:
                return t
        raise KeyError(type_id)

    def line_by_id(self, line_id: int) -> ProductionLine:
        return self.lines[line_id - 1]

    def order_by_id(self, order_id: int) -> Order:
        return self.orders[order_id - 1]

    def scenarios(self) -> list[int]:
        """s_day values for which every event carries a progress snapshot."""
        keys: Optional[set[int]] = None
        for order in self.orders:
            for ev in order.events:
                keys = set(ev.progress) if keys is None else keys & set(ev.progress)
        return sorted(keys or (), reverse=True)

    def at_s_day(self, s_day: int) -> "Dataset":
        """Return the dataset with event flags taken from the ``s_day`` snapshot.

        Events without a snapshot for ``s_day`` keep their current flag.
        """
        orders = tuple(
            replace(
                o,
                events=tuple(
                    replace(ev, finished=ev.progress.get(s_day, ev.finished))
                    for ev in o.events
                ),
            )
            for o in self.orders
        )
        return replace(self, orders=orders, s_day=s_day)

    def without_events(self) -> "Dataset":
        """All pre-production events marked finished."""
        orders = tuple(
            replace(o, events=tuple(replace(ev, finished=True) for ev in o.events))
            for o in self.orders
        )
        return replace(self, orders=orders)

    def with_flat_curves(self, efficiency: float = 1.0) -> "Dataset":
        types = tuple(replace(t, learning_curve=LearningCurve.flat(efficiency)) for t in self.types)
        return replace(self, types=types)


def validate_dataset(dataset: Dataset) -> list[Violation]:
    """Collect every invariant violation; an empty list means the dataset is usable."""
    out: list[Violation] = []

    def add(code: str, message: str) -> None:
        out.append(Violation(code, message))

    type_ids = [t.id for t in dataset.types]
    if sorted(type_ids) != list(range(1, len(type_ids) + 1)):
        add("type_ids", f"product type ids must be unique and contiguous from 1, got {type_ids}")
    for t in dataset.types:
        bps = t.learning_curve.breakpoints
        if not bps:
            add("curve_empty", f"type {t.name}: learning curve has no breakpoints")
            continue
        days = [d for d, _ in bps]
        effs = [e for _, e in bps]
        if days[0] < 1 or any(b <= a for a, b in zip(days, days[1:])):
            add("curve_days", f"type {t.name}: breakpoint days must be >= 1 and strictly increasing")
        if any(not 0.0 < e <= 1.0 for e in effs):
            add("curve_range", f"type {t.name}: efficiencies must lie in (0, 1]")
        if any(b < a for a, b in zip(effs, effs[1:])):
            add("curve_monotone", f"type {t.name}: efficiencies must be nondecreasing")

    line_ids = [ln.id for ln in dataset.lines]
    if line_ids != list(range(1, len(line_ids) + 1)):
        add("line_ids", f"line ids must be 1..m in order, got {line_ids}")
    known = set(type_ids)
    for ln in dataset.lines:
        if not ln.capacity_minutes_per_day > 0:
            add("nonpositive capacity", f"line {ln.id}: capacity must be > 0")
        for tid, e in ln.efficiency_by_type.items():
            if tid not in known:
                add("unknown type", f"line {ln.id}: efficiency for unknown type {tid}")
            if not 0.0 <= e <= 1.0:
                add("line_efficiency", f"line {ln.id}: efficiency {e} for type {tid} outside [0, 1]")

    order_ids = [o.id for o in dataset.orders]
    if order_ids != list(range(1, len(order_ids) + 1)):
        add("order_ids", f"order ids must be 1..n in order, got {order_ids}")
    if not dataset.orders:
        add("no orders", "dataset has no orders")
    for o in dataset.orders:
        if o.product_type not in known:
            add("unknown type", f"order {o.id}: unknown product type {o.product_type}")
        elif not any(ln.accepts(o.product_type) for ln in dataset.lines):
            add("unschedulable order", f"order {o.id}: no line accepts product type {o.product_type}")
        if not o.quantity > 0:
            add("nonpositive quantity", f"order {o.id}: quantity must be > 0")
        if not o.smv > 0:
            add("nonpositive smv", f"order {o.id}: smv must be > 0")
        for ev in o.events:
            if ev.offset_days > 0:
                add("positive offset", f"order {o.id}: event {ev.name!r} has offset {ev.offset_days} > 0")

    if dataset.p_day != P_DAY:
        add("p_day", f"p_day must be {P_DAY}, got {dataset.p_day}")
    if dataset.s_day > dataset.p_day:
        add("s_day", f"s_day {dataset.s_day} is after p_day {dataset.p_day}")
    return out


def accepting_lines(dataset: Dataset, type_id: int) -> list[int]:
    return [ln.id for ln in dataset.lines if ln.accepts(type_id)]


def total_workload_minutes(orders: Sequence[Order], dataset: Dataset) -> float:
    """Sewing minutes needed at each order's best line efficiency and peak learning."""
    total = 0.0
    for o in orders:
        best = max(ln.efficiency(o.product_type) for ln in dataset.lines)
        peak = dataset.type_by_id(o.product_type).learning_curve.saturation_efficiency
        total += o.quantity * o.smv / (best * peak)
    return total
