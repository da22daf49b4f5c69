"""Command-line entry point: ``stitchplan {optimize,decode,sweep,compare,validate}``."""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io as sio
from .domain import validate_dataset
from .moea.pareto import aggregate_pareto
from .moea.runner import RunConfig, RunResult, run
from .noise import SCOPES
from .objectives import conservative_starts, evaluate_schedule, robust_objectives
from .sim import GenomeError, decode_genome, format_line_listing, simulate

log = logging.getLogger("stitchplan")

ALGO_NAMES = {"nsjade": "nsjade", "nsga2": "nsga2", "jade": "jade_single"}
DEFAULT_SDAYS = (-3, -7, -14)


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dataset", type=Path, default=None, help="dataset JSON (default: bundled fastreact20)")
    common.add_argument("--sday", type=_ints, default=None, help="schedule day(s), e.g. -7 or -3,-7,-14")
    common.add_argument("--no-events", action="store_true", help="treat every pre-production event as finished")
    common.add_argument("--out", type=Path, default=Path("results"), help="output directory ($STITCHPLAN_OUT overrides)")
    common.add_argument("-v", "--verbose", action="store_true")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--algo", default=None, help="nsjade, nsga2 or jade; comma list for sweep/compare")
    search.add_argument("--beta", type=_floats, default=None, help="uncertainty factor(s)")
    search.add_argument("--H", dest="h", type=_ints, default=None, help="noise samples per evaluation")
    search.add_argument("--np", dest="np_", type=int, default=400, help="population size")
    search.add_argument("--xi", type=int, default=10, help="generations per genome dimension")
    search.add_argument("--gmax", type=int, default=None, help="generation count (overrides xi)")
    search.add_argument("--runs", type=int, default=30)
    search.add_argument("--seed", type=int, default=42)
    search.add_argument("--jobs", type=int, default=1, help="runs executed concurrently")
    search.add_argument("--noise-scope", choices=SCOPES, default="order_day")

    p = argparse.ArgumentParser(prog="stitchplan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("optimize", parents=[common, search], help="run one scenario for --runs seeds")
    sub.add_parser("sweep", parents=[common, search], help="one front per (beta, H, s_day) combination")
    sub.add_parser("compare", parents=[common, search], help="boundary statistics for several algorithms")
    dec = sub.add_parser("decode", parents=[common], help="decode one genome into a schedule")
    dec.add_argument("--genome", type=Path, required=True, help="JSON list or whitespace/comma separated values")
    dec.add_argument("--beta", type=float, default=0.0)
    dec.add_argument("--H", dest="h", type=int, default=None)
    dec.add_argument("--seed", type=int, default=0)
    dec.add_argument("--noise-scope", choices=SCOPES, default="order_day")
    sub.add_parser("validate", parents=[common], help="validate a dataset and print conservative starts")
    return p


def _out_dir(args) -> Path:
    out = Path(os.environ.get("STITCHPLAN_OUT") or args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args, s_day: Optional[int] = None):
    try:
        ds = sio.load_dataset(args.dataset, s_day=s_day)
    except sio.DatasetError as exc:
        raise CliError(str(exc)) from exc
    if s_day is not None and ds.scenarios() and s_day not in ds.scenarios():
        log.warning("s_day %d has no event snapshot in the dataset; using file flags", s_day)
    return ds.without_events() if args.no_events else ds


def _resolve_algos(text: Optional[str], default: str = "nsjade") -> list[str]:
    text = text or default
    out = []
    for name in text.split(","):
        name = name.strip()
        if name not in ALGO_NAMES:
            raise CliError(f"unknown algorithm {name!r}; choose from {sorted(ALGO_NAMES)}")
        out.append(ALGO_NAMES[name])
    return out


def _single_run(payload):
    config, dataset = payload
    return run(config, dataset)


def _execute(configs: Sequence[RunConfig], dataset, jobs: int) -> list[RunResult]:
    if jobs <= 1 or len(configs) <= 1:
        return [run(c, dataset) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_single_run, [(c, dataset) for c in configs]))


def run_scenario(args, algo: str, s_day: int, beta: float, h: int, out: Path) -> tuple[sio.PfRecord, dict]:
    """All seeds of one scenario; writes per-run artifacts, the aggregated front and boundary stats."""
    ds = _load(args, s_day)
    base = RunConfig(np=args.np_, xi=args.xi, g_max=args.gmax, h_samples=h, beta=beta, seed=args.seed,
                     algorithm=algo, s_day=s_day, noise_scope=args.noise_scope)
    seeds = [args.seed + r for r in range(args.runs)]
    configs = [replace(base, seed=s) for s in seeds]
    record = sio.PfRecord(s_day, beta, h, algo, [], seeds)
    sdir = out / record.label()
    sdir.mkdir(parents=True, exist_ok=True)
    dhash = sio.dataset_hash(ds)
    manifests = []
    for cfg in configs:
        rdir = sdir / f"seed{cfg.seed}"
        rdir.mkdir(exist_ok=True)
        m = sio.RunManifest(config=cfg.to_dict(), dataset_hash=dhash)
        m.write(rdir / "manifest.json")
        manifests.append((m, rdir))

    log.info("scenario %s: %d run(s)", record.label(), len(configs))
    results = _execute(configs, ds, args.jobs)

    fronts = []
    for res, (m, rdir) in zip(results, manifests):
        front = aggregate_pareto([res.objectives[res.ranks == 0]])
        fronts.append(front)
        sio.write_generation_stats(res.stats, rdir / "stats.csv")
        sio.write_population(res.objectives, res.ranks, res.crowding, res.genomes, rdir / "population.csv")
        sio.export_front(replace(record, points=[tuple(p) for p in front]), rdir / "front.csv")
        m.complete(rdir / "manifest.json", stats=rdir / "stats.csv", population=rdir / "population.csv",
                   front=rdir / "front.csv")

    agg = aggregate_pareto(results)
    record = replace(record, points=[tuple(map(float, p)) for p in agg])
    sio.export_front(record, sdir / "front.csv")
    stats = sio.boundary_stats(fronts)
    sio.write_boundary_stats([sio.boundary_stats_row(record, stats)], sdir / "boundary_stats.csv")

    if algo == "jade_single":
        curves = np.array([r.best_curve for r in results])
        with open(sdir / "trajectory.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["generation", "mean_best_f1"] + [f"seed{s}" for s in seeds])
            for g in range(curves.shape[1]):
                w.writerow([g, repr(float(curves[:, g].mean()))] + [repr(float(v)) for v in curves[:, g]])
    return record, stats


def _scenario_values(args, algo: str) -> tuple[list[int], list[float], list[int]]:
    sdays = args.sday or ([-7] if args.command == "optimize" else list(DEFAULT_SDAYS))
    if args.beta is not None:
        betas = args.beta
    else:
        # the single-objective baseline runs noise-free unless asked otherwise
        betas = [0.0] if algo == "jade_single" else [0.2]
    hs = args.h or ([1] if algo == "jade_single" and args.beta is None else [5])
    if not sdays or not betas or not hs:
        raise CliError("empty sweep list")
    for b in betas:
        if not 0.0 <= b < 1.0:
            raise CliError(f"beta must lie in [0, 1), got {b}")
    if any(h < 1 for h in hs):
        raise CliError("H must be >= 1")
    return sdays, betas, hs


def cmd_optimize(args) -> int:
    algos = _resolve_algos(args.algo)
    if len(algos) != 1:
        raise CliError("optimize takes exactly one --algo (use compare for several)")
    algo = algos[0]
    sdays, betas, hs = _scenario_values(args, algo)
    if len(sdays) * len(betas) * len(hs) != 1:
        raise CliError("optimize takes a single --sday/--beta/--H value (use sweep for lists)")
    out = _out_dir(args)
    top = sio.RunManifest(config={"command": "optimize", **_echo(args)}, dataset_hash=sio.dataset_hash(_load(args, sdays[0])))
    top.write(out / "manifest.json")
    record, stats = run_scenario(args, algo, sdays[0], betas[0], hs[0], out)
    print(f"{record.label()}: {len(record.points)} nondominated point(s) over {args.runs} run(s)")
    for p in record.points:
        print(f"  f1={p[0]:.3f}  f2={p[1]:.3f}")
    print(sio.format_table_v({algo: {sdays[0]: stats}}))
    top.complete(out / "manifest.json", scenario=out / record.label())
    return 0


def cmd_sweep(args) -> int:
    algos = _resolve_algos(args.algo)
    out = _out_dir(args)
    top = sio.RunManifest(config={"command": "sweep", **_echo(args)}, dataset_hash=sio.dataset_hash(_load(args)))
    top.write(out / "manifest.json")
    rows = []
    stat_rows = []
    for algo in algos:
        sdays, betas, hs = _scenario_values(args, algo)
        for s_day, beta, h in itertools.product(sdays, betas, hs):
            record, stats = run_scenario(args, algo, s_day, beta, h, out)
            print(f"{record.label()}: {len(record.points)} point(s)")
            rows.extend((record.label(), algo, s_day, beta, h, p[0], p[1]) for p in record.points)
            stat_rows.append(sio.boundary_stats_row(record, stats))
    with open(out / "sweep_fronts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario", "algorithm", "s_day", "beta", "H", "f1", "f2"])
        w.writerows(rows)
    sio.write_boundary_stats(stat_rows, out / "boundary_stats.csv")
    top.complete(out / "manifest.json", fronts=out / "sweep_fronts.csv", stats=out / "boundary_stats.csv")
    return 0


def cmd_compare(args) -> int:
    algos = _resolve_algos(args.algo, default="nsjade,nsga2")
    out = _out_dir(args)
    top = sio.RunManifest(config={"command": "compare", **_echo(args)}, dataset_hash=sio.dataset_hash(_load(args)))
    top.write(out / "manifest.json")
    table: dict[str, dict[int, dict]] = {}
    stat_rows = []
    for algo in algos:
        sdays, betas, hs = _scenario_values(args, algo)
        if len(betas) != 1 or len(hs) != 1:
            raise CliError("compare takes a single --beta and --H value")
        for s_day in sdays:
            record, stats = run_scenario(args, algo, s_day, betas[0], hs[0], out)
            table.setdefault(algo, {})[s_day] = stats
            stat_rows.append(sio.boundary_stats_row(record, stats))
    sio.write_boundary_stats(stat_rows, out / "boundary_stats.csv")
    text = sio.format_table_v(table)
    (out / "boundary_table.txt").write_text(text)
    print(text)
    top.complete(out / "manifest.json", stats=out / "boundary_stats.csv", table=out / "boundary_table.txt")
    return 0


def read_genome(path: Path) -> np.ndarray:
    text = path.read_text().strip()
    try:
        vals = json.loads(text)
    except json.JSONDecodeError:
        vals = [float(x) for x in text.replace(",", " ").split()]
    return np.asarray(vals, dtype=float).ravel()


def cmd_decode(args) -> int:
    s_day = args.sday[0] if args.sday else None
    ds = _load(args, s_day)
    genome = read_genome(args.genome)
    try:
        plan = decode_genome(genome, ds)
    except GenomeError as exc:
        raise CliError(str(exc)) from exc
    sched = simulate(plan, ds)
    f1, f2 = evaluate_schedule(sched, ds)
    out = _out_dir(args)
    (out / "gantt.csv").write_text(sched.gantt_csv())
    (out / "schedule.json").write_text(json.dumps(sched.to_dict(), indent=2) + "\n")
    print("line  assignments")
    print(format_line_listing(sched))
    print(f"deterministic: f1={f1:g} f2={f2:g}")
    if args.h is not None:
        rp = robust_objectives(genome, ds, args.h, args.beta, args.seed, args.noise_scope)
        print(f"robust (H={args.h}, beta={args.beta:g}, seed={args.seed}): f1_eff={rp.f1!r} f2_eff={rp.f2!r}")
    return 0


def cmd_validate(args) -> int:
    try:
        ds = sio.load_dataset(args.dataset, validate=False)
    except sio.DatasetError as exc:
        raise CliError(str(exc)) from exc
    violations = validate_dataset(ds)
    for v in violations:
        print(f"[{v.code}] {v.message}")
    if violations:
        return 1
    print(f"{ds.name or args.dataset}: {ds.n_orders} orders, {ds.n_lines} lines, valid")
    sdays = args.sday or ds.scenarios() or [ds.s_day]
    starts = {s: conservative_starts(ds.at_s_day(s)) for s in sdays}
    print("order  " + "  ".join(f"C(s={s})" for s in sdays))
    for o in ds.orders:
        print(f"{o.id:>5d}  " + "  ".join(f"{starts[s][o.id]:>7d}" for s in sdays))
    return 0


def _echo(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


COMMANDS = {
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "decode": cmd_decode,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
