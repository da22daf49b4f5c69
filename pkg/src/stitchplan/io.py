"""Dataset files, run manifests and result exports."""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from .domain import (
    Dataset,
    LearningCurve,
    Order,
    PreProductionEvent,
    ProductionLine,
    ProductType,
    validate_dataset,
)


class DatasetError(Exception):
    """Base class for dataset loading failures."""


class DatasetNotFoundError(DatasetError, FileNotFoundError):
    pass


class DatasetParseError(DatasetError, ValueError):
    pass


class DatasetSchemaError(DatasetError, ValueError):
    pass


class DatasetValidationError(DatasetError, ValueError):
    def __init__(self, path, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  {path}: [{v.code}] {v.message}" for v in self.violations)
        super().__init__(f"{path}: dataset failed validation\n{lines}")


def bundled_dataset_path() -> Path:
    return Path(str(resources.files("stitchplan") / "data" / "fastreact20.json"))


_TOP_KEYS = {"name", "lines", "orders", "product_types", "s_day", "p_day", "scenarios", "notes"}
_TYPE_KEYS = {"id", "name", "learning_curve", "notes"}
_LINE_KEYS = {"id", "capacity_minutes_per_day", "efficiency"}
_ORDER_KEYS = {"id", "product_type", "quantity", "due_day", "smv", "events"}
_EVENT_KEYS = {"name", "offset_days", "finished"}


def _warn_extras(obj: Mapping, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        warnings.warn(f"{where}: ignoring unknown field(s) {extra}", stacklevel=3)


def _require(obj: Any, key: str, where: str, kind=None):
    if not isinstance(obj, Mapping):
        raise DatasetSchemaError(f"{where}: expected an object")
    if key not in obj:
        raise DatasetSchemaError(f"{where}.{key}: missing required field")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool) and kind is not bool):
        raise DatasetSchemaError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}, got {val!r}")
    return val


_NUM = (int, float)


def dataset_from_dict(doc: Mapping, source: str = "<dataset>", s_day: Optional[int] = None) -> Dataset:
    """Build a Dataset from its JSON document form (schema errors are path-qualified)."""
    if not isinstance(doc, Mapping):
        raise DatasetSchemaError(f"{source}: top level must be an object")
    _warn_extras(doc, _TOP_KEYS, source)

    raw_types = _require(doc, "product_types", source, list)
    types = []
    name_to_id: dict[str, int] = {}
    for i, t in enumerate(raw_types):
        where = f"{source}:product_types[{i}]"
        _warn_extras(t, _TYPE_KEYS, where)
        tid = _require(t, "id", where, int)
        name = _require(t, "name", where, str)
        bps = _require(t, "learning_curve", where, list)
        try:
            curve = LearningCurve(tuple((int(d), float(e)) for d, e in bps))
        except (TypeError, ValueError) as exc:
            raise DatasetSchemaError(f"{where}.learning_curve: expected [[day, efficiency], ...]") from exc
        types.append(ProductType(tid, name, curve))
        name_to_id[name] = tid

    def type_ref(ref, where):
        if isinstance(ref, str):
            if ref not in name_to_id:
                raise DatasetSchemaError(f"{where}: unknown product type {ref!r}")
            return name_to_id[ref]
        if isinstance(ref, int) and not isinstance(ref, bool):
            return ref
        raise DatasetSchemaError(f"{where}: product type must be a name or id, got {ref!r}")

    lines = []
    for i, ln in enumerate(_require(doc, "lines", source, list)):
        where = f"{source}:lines[{i}]"
        _warn_extras(ln, _LINE_KEYS, where)
        eff = _require(ln, "efficiency", where, Mapping)
        by_type = {}
        for k, v in eff.items():
            if not isinstance(v, _NUM) or isinstance(v, bool):
                raise DatasetSchemaError(f"{where}.efficiency.{k}: expected a number, got {v!r}")
            by_type[type_ref(k, f"{where}.efficiency")] = float(v)
        lines.append(
            ProductionLine(
                id=_require(ln, "id", where, int),
                efficiency_by_type=by_type,
                capacity_minutes_per_day=float(_require(ln, "capacity_minutes_per_day", where, _NUM)),
            )
        )

    orders = []
    for i, o in enumerate(_require(doc, "orders", source, list)):
        where = f"{source}:orders[{i}]"
        _warn_extras(o, _ORDER_KEYS, where)
        events = []
        for k, ev in enumerate(o.get("events", [])):
            ew = f"{where}.events[{k}]"
            _warn_extras(ev, _EVENT_KEYS, ew)
            fin = ev.get("finished", False)
            if isinstance(fin, bool):
                flag, progress = fin, {}
            elif isinstance(fin, Mapping):
                try:
                    progress = {int(sd): bool(v) for sd, v in fin.items()}
                except ValueError as exc:
                    raise DatasetSchemaError(f"{ew}.finished: snapshot keys must be integer s_day values") from exc
                flag = False
            else:
                raise DatasetSchemaError(f"{ew}.finished: expected a boolean or an s_day -> boolean map")
            events.append(
                PreProductionEvent(
                    name=_require(ev, "name", ew, str),
                    offset_days=_require(ev, "offset_days", ew, int),
                    finished=flag,
                    progress=progress,
                )
            )
        orders.append(
            Order(
                id=_require(o, "id", where, int),
                product_type=type_ref(_require(o, "product_type", where), f"{where}.product_type"),
                quantity=_require(o, "quantity", where, int),
                due_day=_require(o, "due_day", where, int),
                smv=float(_require(o, "smv", where, _NUM)),
                events=tuple(events),
            )
        )

    file_s_day = _require(doc, "s_day", source, int)
    ds = Dataset(
        lines=tuple(lines),
        orders=tuple(orders),
        types=tuple(types),
        s_day=file_s_day,
        p_day=int(doc.get("p_day", 0)),
        name=str(doc.get("name", "")),
    )
    return ds.at_s_day(file_s_day if s_day is None else s_day)


def load_dataset(path=None, s_day: Optional[int] = None, validate: bool = True) -> Dataset:
    """Load and validate a dataset file; ``path=None`` loads the bundled instance.

    ``s_day`` selects an event-progress snapshot other than the file's default.
    """
    path = Path(path) if path is not None else bundled_dataset_path()
    if not path.is_file():
        raise DatasetNotFoundError(f"{path}: no such dataset file")
    raw = path.read_bytes()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise DatasetParseError(f"{path}: not UTF-8 (byte offset {exc.start})") from exc
    except json.JSONDecodeError as exc:
        raise DatasetParseError(
            f"{path}: malformed JSON at byte offset {len(exc.doc[: exc.pos].encode('utf-8'))} "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    ds = dataset_from_dict(doc, source=str(path), s_day=s_day)
    if validate:
        violations = validate_dataset(ds)
        if violations:
            raise DatasetValidationError(path, violations)
    return ds


def dataset_to_dict(ds: Dataset) -> dict:
    """Canonical JSON document form; ``load`` of this round-trips to an equal Dataset."""
    tname = {t.id: t.name for t in ds.types}

    def finished(ev: PreProductionEvent):
        if ev.progress:
            return {str(k): v for k, v in sorted(ev.progress.items(), reverse=True)}
        return ev.finished

    return {
        "name": ds.name,
        "s_day": ds.s_day,
        "p_day": ds.p_day,
        "product_types": [
            {"id": t.id, "name": t.name, "learning_curve": [[d, e] for d, e in t.learning_curve.breakpoints]}
            for t in ds.types
        ],
        "lines": [
            {
                "id": ln.id,
                "capacity_minutes_per_day": ln.capacity_minutes_per_day,
                "efficiency": {tname[k]: v for k, v in sorted(ln.efficiency_by_type.items())},
            }
            for ln in ds.lines
        ],
        "orders": [
            {
                "id": o.id,
                "product_type": tname[o.product_type],
                "quantity": o.quantity,
                "due_day": o.due_day,
                "smv": o.smv,
                "events": [
                    {"name": ev.name, "offset_days": ev.offset_days, "finished": finished(ev)}
                    for ev in o.events
                ],
            }
            for o in ds.orders
        ],
    }


def save_dataset(ds: Dataset, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(dataset_to_dict(ds), indent=2) + "\n")
    return path


def dataset_hash(ds: Dataset) -> str:
    canon = json.dumps(dataset_to_dict(ds), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Fronts and statistics
# ---------------------------------------------------------------------------


@dataclass
class PfRecord:
    """A Pareto front together with the scenario that produced it."""

    s_day: int
    beta: float
    h_samples: int
    algorithm: str
    points: list[tuple[float, float]]
    seeds: list[int] = field(default_factory=list)

    def label(self) -> str:
        return f"{self.algorithm}_sday{self.s_day}_beta{self.beta:g}_H{self.h_samples}"


def _fmt(x: float) -> str:
    return repr(float(x))


def export_front(record: PfRecord, path) -> Path:
    """Write ``f1,f2`` rows sorted by f1 then f2. Output is byte-stable."""
    path = Path(path)
    pts = sorted((float(a), float(b)) for a, b in record.points)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["f1", "f2"])
    for a, b in pts:
        w.writerow([_fmt(a), _fmt(b)])
    path.write_text(buf.getvalue())
    return path


def read_front(path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        return [(float(r["f1"]), float(r["f2"])) for r in csv.DictReader(fh)]


def boundary_points(front) -> tuple[tuple[float, float], tuple[float, float]]:
    """Lexicographic extremes: (min f1, ties by f2) and (min f2, ties by f1)."""
    pts = [(float(a), float(b)) for a, b in front]
    if not pts:
        raise ValueError("empty front has no boundary points")
    b1 = min(pts, key=lambda p: (p[0], p[1]))
    b2 = min(pts, key=lambda p: (p[1], p[0]))
    return b1, b2


def boundary_stats(fronts: Sequence) -> dict:
    """Mean and sample std (n-1) of each boundary coordinate across per-run fronts.

    Returns ``{"runs": k, "boundary1": {"f1": (mean, std), "f2": ...}, "boundary2": {...}}``.
    With a single run the std is reported as 0.
    """
    if not fronts:
        raise ValueError("boundary_stats needs at least one front")
    b = np.array([boundary_points(f) for f in fronts])  # runs x 2 x 2
    ddof = 1 if len(fronts) > 1 else 0
    mean = b.mean(axis=0)
    std = b.std(axis=0, ddof=ddof)
    out: dict[str, Any] = {"runs": len(fronts)}
    for k, name in enumerate(("boundary1", "boundary2")):
        out[name] = {
            "f1": (float(mean[k, 0]), float(std[k, 0])),
            "f2": (float(mean[k, 1]), float(std[k, 1])),
        }
    return out


STATS_HEADER = ["algorithm", "s_day", "beta", "H", "runs",
                "b1_f1_mean", "b1_f1_std", "b1_f2_mean", "b1_f2_std",
                "b2_f1_mean", "b2_f1_std", "b2_f2_mean", "b2_f2_std"]


def boundary_stats_row(record: PfRecord, stats: Mapping) -> list:
    return [
        record.algorithm, record.s_day, record.beta, record.h_samples, stats["runs"],
        *stats["boundary1"]["f1"], *stats["boundary1"]["f2"],
        *stats["boundary2"]["f1"], *stats["boundary2"]["f2"],
    ]


def write_boundary_stats(rows: Iterable[Sequence], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATS_HEADER)
        for r in rows:
            w.writerow(r)
    return path


def format_table_v(entries: Mapping[str, Mapping[int, Mapping]]) -> str:
    """Render ``{algorithm: {s_day: stats}}`` as a plain-text mean±std table."""
    out = []
    sdays = sorted({s for per in entries.values() for s in per}, reverse=True)
    for s in sdays:
        out.append(f"S_day = {s}")
        out.append(f"{'':10s} {'b1 f1':>12s} {'b1 f2':>12s} {'b2 f1':>12s} {'b2 f2':>12s}")
        for algo, per in entries.items():
            if s not in per:
                continue
            st = per[s]
            cells = [st["boundary1"]["f1"], st["boundary1"]["f2"], st["boundary2"]["f1"], st["boundary2"]["f2"]]
            out.append(f"{algo:10s} " + " ".join(f"{m:6.1f}±{sd:<5.1f}" for m, sd in cells))
        out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------------------
# Run persistence
# ---------------------------------------------------------------------------


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    config: dict
    dataset_hash: str
    status: str = "incomplete"
    started: str = field(default_factory=_now)
    finished: Optional[str] = None
    artifacts: dict = field(default_factory=dict)

    def write(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True, default=str) + "\n")
        return path

    def complete(self, path, **artifacts) -> Path:
        self.artifacts.update({k: str(v) for k, v in artifacts.items()})
        self.status = "complete"
        self.finished = _now()
        return self.write(path)

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))


def write_generation_stats(stats: Sequence[Mapping], path) -> Path:
    path = Path(path)
    if not stats:
        path.write_text("")
        return path
    keys = list(stats[0].keys())
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for row in stats:
            w.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
    return path


def write_population(objectives, ranks, crowding, genomes, path) -> Path:
    """Final population CSV: ``f1,f2,rank,crowding,g0..g{D-1}``."""
    path = Path(path)
    genomes = np.asarray(genomes)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["f1", "f2", "rank", "crowding"] + [f"g{k}" for k in range(genomes.shape[1])])
        for (a, b), r, c, g in zip(objectives, ranks, crowding, genomes):
            cd = "inf" if math.isinf(c) else _fmt(c)
            w.writerow([_fmt(a), _fmt(b), int(r), cd] + [_fmt(x) for x in g])
    return path


def write_objective_rows(rows: Iterable[Sequence], path) -> Path:
    """Evaluation log ``genome_hash,f1,f2,kind,H,beta,seed``."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["genome_hash", "f1", "f2", "kind", "H", "beta", "seed"])
        for r in rows:
            w.writerow(r)
    return path


def genome_hash(genome) -> str:
    arr = np.ascontiguousarray(np.asarray(genome, dtype=np.float64))
    return hashlib.sha256(arr.tobytes()).hexdigest()[:16]
