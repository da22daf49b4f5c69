"""Daily production-quantity noise.

Robust evaluation needs noise that is a pure function of
``(seed, sample, stream, day)`` so that evaluations can run in any order or
process and still agree bit for bit, including inside the compiled batch
kernel. numpy's Generator objects cannot be addressed that way from compiled
code, so draws come from a SplitMix64 hash of the counter tuple.
"""

from __future__ import annotations

from typing import Iterable, Iterator

M64 = 0xFFFFFFFFFFFFFFFF
INV_2_53 = 1.0 / 9007199254740992.0

ORDER_DAY = "order_day"
LINE_DAY = "line_day"
SCOPES = (ORDER_DAY, LINE_DAY)


class NoiseExhaustedError(RuntimeError):
    """A finite noise sequence ran out before the simulation finished."""


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def counter_uniform(seed: int, sample: int, stream: int, day: int) -> float:
    """Uniform [0, 1) value addressed by the counter tuple."""
    h = splitmix64(seed & M64)
    h = splitmix64(h ^ (sample & M64))
    h = splitmix64(h ^ (stream & M64))
    h = splitmix64(h ^ (day & M64))
    return (h >> 11) * INV_2_53


def order_stream(order_id: int, sub_index: int) -> int:
    return 4 * order_id + sub_index


class ZeroNoise:
    beta = 0.0

    def __call__(self, line_id: int, day: int, order_id: int, sub_index: int, d: int) -> float:
        return 0.0


class CounterNoise:
    """Uniform noise on ``[-beta, beta)`` drawn per order-day or per line-day.

    ``order_day`` keys a draw by (order, sub-order, processing day) and
    ``line_day`` by (line, calendar day), so two sub-orders sharing a line-day
    see the same value.
    """

    def __init__(self, beta: float, seed: int, sample: int = 0, scope: str = ORDER_DAY):
        if scope not in SCOPES:
            raise ValueError(f"unknown noise scope {scope!r}")
        if not 0.0 <= beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {beta}")
        self.beta = float(beta)
        self.seed = int(seed)
        self.sample = int(sample)
        self.scope = scope

    def __call__(self, line_id: int, day: int, order_id: int, sub_index: int, d: int) -> float:
        if self.beta == 0.0:
            return 0.0
        if self.scope == LINE_DAY:
            u = counter_uniform(self.seed, self.sample, line_id, day)
        else:
            u = counter_uniform(self.seed, self.sample, order_stream(order_id, sub_index), d)
        return self.beta * (2.0 * u - 1.0)


class SequenceNoise:
    """Replays explicit values, one per simulated sub-order day, in call order.

    The simulator walks lines by ascending id and days ascending, so the
    sequence is consumed in that order.
    """

    def __init__(self, values: Iterable[float]):
        self._it: Iterator[float] = iter(values)
        self.consumed = 0

    def __call__(self, line_id: int, day: int, order_id: int, sub_index: int, d: int) -> float:
        try:
            v = next(self._it)
        except StopIteration:
            raise NoiseExhaustedError(
                f"noise sequence exhausted after {self.consumed} values "
                f"(line {line_id}, day {day})"
            ) from None
        self.consumed += 1
        return float(v)
