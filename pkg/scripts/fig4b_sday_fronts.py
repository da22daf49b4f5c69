#!/usr/bin/env python3
"""Deterministic NSJADE fronts for s_day = -3, -7 and -14."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig4b")
sys.exit(run(["sweep", "--algo", "nsjade", "--sday=-3,-7,-14", "--beta", "0", "--H", "1",
              "--out", args.out, "--jobs", args.jobs, *scale_args(args.scale)]))
