#!/usr/bin/env python3
"""Robust fronts at s_day = -7 for beta in {0, 0.1, 0.2, 0.3} with H = 5."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig6")
sys.exit(run(["sweep", "--sday=-7", "--beta", "0,0.1,0.2,0.3", "--H", "5",
              "--out", args.out, "--jobs", args.jobs, *scale_args(args.scale)]))
