#!/usr/bin/env python3
"""NSJADE against NSGA-II: aggregated fronts and the boundary-point table for each s_day."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig8")
sys.exit(run(["compare", "--algo", "nsjade,nsga2", "--sday=-3,-7,-14", "--beta", "0.2", "--H", "5",
              "--out", args.out, "--jobs", args.jobs, *scale_args(args.scale)]))
