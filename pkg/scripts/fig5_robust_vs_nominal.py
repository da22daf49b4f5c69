#!/usr/bin/env python3
"""Non-robust (beta=0, H=1) against robust (beta=0.2, H=5) fronts for each s_day."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig5")
common = ["--sday=-3,-7,-14", "--jobs", args.jobs, *scale_args(args.scale)]
code = run(["sweep", "--beta", "0", "--H", "1", "--out", f"{args.out}/nominal", *common])
code = code or run(["sweep", "--beta", "0.2", "--H", "5", "--out", f"{args.out}/robust", *common])
sys.exit(code)
