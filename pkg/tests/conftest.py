import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stitchplan.domain import (  # noqa: E402
    Dataset,
    LearningCurve,
    Order,
    PreProductionEvent,
    ProductionLine,
    ProductType,
)
from stitchplan.io import load_dataset  # noqa: E402

RAMP = LearningCurve(((1, 0.5), (2, 0.7), (3, 0.85), (4, 1.0)))


@pytest.fixture(scope="session")
def bundled():
    return load_dataset()


def make_dataset(orders, lines=None, types=None, s_day=-7, curve=None):
    curve = curve or LearningCurve.flat()
    types = types or (ProductType(1, "skirts", curve), ProductType(2, "blouses", curve))
    lines = lines or (ProductionLine(1, {1: 1.0, 2: 0.8}, 6720.0),)
    return Dataset(lines=tuple(lines), orders=tuple(orders), types=tuple(types), s_day=s_day)


def toy_dataset(with_events=False):
    """3 orders, 2 lines, flat curves, small enough to enumerate."""
    curve = LearningCurve.flat()
    types = (ProductType(1, "skirts", curve), ProductType(2, "blouses", curve))
    lines = (
        ProductionLine(1, {1: 1.0, 2: 0.8}, 480.0),
        ProductionLine(2, {1: 0.8, 2: 1.0}, 480.0),
    )

    def ev(offset):
        if not with_events:
            return ()
        return (PreProductionEvent("Sample Approval", offset, finished=False),)

    orders = (
        Order(1, 1, 100, 2, 10.0, ev(-9)),
        Order(2, 2, 60, 1, 12.0, ev(-5)),
        Order(3, 1, 80, 2, 9.0, ev(-4)),
    )
    return Dataset(lines=lines, orders=orders, types=types, s_day=-3)


@pytest.fixture
def toy():
    return toy_dataset()


@pytest.fixture
def toy_events():
    return toy_dataset(with_events=True)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
