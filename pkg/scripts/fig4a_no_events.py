#!/usr/bin/env python3
"""Single-objective JADE with every pre-production event finished: mean best tardiness per generation."""

import sys

from _common import parse, run, scale_args

args = parse(__doc__, "results/fig4a")
argv = ["optimize", "--algo", "jade", "--no-events", "--out", args.out, "--jobs", args.jobs, *scale_args(args.scale)]
if args.scale != "full":
    argv += ["--gmax", "800"]
sys.exit(run(argv))
