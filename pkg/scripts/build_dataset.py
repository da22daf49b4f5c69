#!/usr/bin/env python3
"""Regenerate src/stitchplan/data/fastreact20.json.

Order and line attributes are the 20-order / 6-line Fast React instance.
Each order gets the standard event timetable; per-scenario finished flags are
set so that the largest unfinished offset reproduces the recorded conservative
start for s_day = -3, -7 and -14. Learning curves are stand-in ramps (the
original curves are only available as unlabeled plots).
"""

import json
from pathlib import Path

SCENARIOS = (-3, -7, -14)

TIMETABLE = [
    ("PO Receive", -60),
    ("Order Fabric", -55),
    ("Order Trims", -40),
    ("Lab Dip Submit", -35),
    ("Fit Sample Approval", -25),
    ("Lab Dip Approval", -20),
    ("Sample Approval", -15),
    ("Fabric Receipt", -10),
    ("Issue Markers", -7),
    ("Trims Receipt", -7),
    ("Factory PP Meeting", -7),
]

# id, type, quantity, conservative start at (-3, -7, -14), due day, smv
ORDERS = [
    (1, "skirts", 870, (0, 0, 6), 10, 14.20),
    (2, "skirts", 700, (0, 0, 6), 7, 18.20),
    (3, "blouses", 800, (0, 0, 6), 11, 18.20),
    (4, "skirts", 500, (0, 3, 0), 9, 18.20),
    (5, "skirts", 1000, (0, 0, 0), 11, 16.70),
    (6, "skirts", 1000, (7, 3, 0), 10, 16.70),
    (7, "blouses", 800, (0, 0, 6), 7, 32.20),
    (8, "jackets", 850, (12, 8, 1), 15, 54.60),
    (9, "skirts", 800, (0, 0, 6), 10, 16.70),
    (10, "pants", 780, (12, 8, 1), 15, 34.00),
    (11, "blouses", 1000, (0, 0, 11), 15, 15.00),
    (12, "jackets", 1000, (0, 0, 6), 8, 53.78),
    (13, "skirts", 400, (22, 18, 11), 24, 26.50),
    (14, "blouses", 2000, (0, 13, 6), 15, 12.60),
    (15, "blouses", 1000, (4, 0, 0), 11, 12.60),
    (16, "jackets", 500, (12, 8, 1), 18, 44.10),
    (17, "skirts", 800, (0, 0, 11), 15, 20.55),
    (18, "skirts", 800, (0, 0, 0), 19, 20.55),
    (19, "jackets", 700, (0, 18, 11), 20, 44.10),
    (20, "blouses", 3000, (17, 13, 6), 19, 12.60),
]

# capacity, efficiency for skirts/pants, blouses, jackets
LINES = [
    (6720, 1.0, 0.8, 0.8),
    (6720, 1.0, 0.8, 0.8),
    (6240, 0.8, 1.0, 0.8),
    (6240, 0.8, 1.0, 0.8),
    (6720, 0.8, 0.8, 1.0),
    (6720, 0.8, 0.8, 1.0),
]

SKIRTS_PANTS = [[1, 0.6], [2, 0.75], [3, 0.9], [4, 1.0]]
BLOUSES = [[1, 0.5], [2, 0.7], [3, 0.85], [4, 1.0]]
JACKETS = [[1, 0.4], [2, 0.55], [3, 0.7], [4, 0.85], [5, 0.95], [6, 1.0]]

TYPES = [
    (1, "skirts", SKIRTS_PANTS),
    (2, "pants", SKIRTS_PANTS),
    (3, "blouses", BLOUSES),
    (4, "jackets", JACKETS),
]


def snapshot(c_day, s_day):
    """Finished flags per timetable entry giving conservative start ``c_day``."""
    lead = -s_day
    if c_day == 0:
        # anything due before s_day is done; events still ahead stay open
        return [abs(off) > lead for _, off in TIMETABLE]
    target = c_day + lead
    if target not in {abs(off) for _, off in TIMETABLE}:
        raise ValueError(f"no timetable event with offset -{target}")
    return [abs(off) > target for _, off in TIMETABLE]


def build():
    orders = []
    for oid, tname, qty, cdays, due, smv in ORDERS:
        flags = {s: snapshot(c, s) for s, c in zip(SCENARIOS, cdays)}
        events = [
            {"name": name, "offset_days": off, "finished": {str(s): flags[s][k] for s in SCENARIOS}}
            for k, (name, off) in enumerate(TIMETABLE)
        ]
        orders.append(
            {"id": oid, "product_type": tname, "quantity": qty, "due_day": due, "smv": smv, "events": events}
        )
    lines = [
        {
            "id": i + 1,
            "capacity_minutes_per_day": cap,
            "efficiency": {"skirts": sp, "pants": sp, "blouses": bl, "jackets": jk},
        }
        for i, (cap, sp, bl, jk) in enumerate(LINES)
    ]
    types = [{"id": tid, "name": name, "learning_curve": curve} for tid, name, curve in TYPES]
    return {
        "name": "fastreact20",
        "notes": "learning curves are stand-in ramps; see docs/dataset-schema.md",
        "s_day": -7,
        "p_day": 0,
        "scenarios": list(SCENARIOS),
        "product_types": types,
        "lines": lines,
        "orders": orders,
    }


if __name__ == "__main__":
    out = Path(__file__).resolve().parents[1] / "src" / "stitchplan" / "data" / "fastreact20.json"
    out.write_text(json.dumps(build(), indent=2) + "\n")
    print(f"wrote {out}")
