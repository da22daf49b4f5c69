"""Shared argument handling for the figure scripts."""

import argparse

from stitchplan.cli import main as cli_main

QUICK = ["--np", "60", "--gmax", "60", "--runs", "3"]
DESK = ["--np", "200", "--gmax", "400", "--runs", "10"]


def parse(description: str, default_out: str):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--scale", choices=("quick", "desk", "full"), default="desk",
                    help="quick smoke run, desk scale, or the full NP=400, G=D*10, 30-run setting")
    ap.add_argument("--out", default=default_out)
    ap.add_argument("--jobs", default="1")
    return ap.parse_args()


def scale_args(scale: str) -> list[str]:
    return {"quick": QUICK, "desk": DESK, "full": ["--np", "400", "--xi", "10", "--runs", "30"]}[scale]


def run(argv: list[str]) -> int:
    print("stitchplan " + " ".join(argv))
    return cli_main(argv)
