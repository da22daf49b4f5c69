#!/usr/bin/env python3
"""Robust fronts at s_day = -7, beta = 0.2, for H in {1, 5, 10, 20}."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig7")
sys.exit(run(["sweep", "--sday=-7", "--beta", "0.2", "--H", "1,5,10,20",
              "--out", args.out, "--jobs", args.jobs, *scale_args(args.scale)]))
