"""Run tables, series files and machine-readable exports."""

from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from . import __version__
from .engine import RunRecord, TraceRecord
from .errors import ConfigurationError
from .sweep import SweepResult

__all__ = [
    "SCHEMA",
    "CSV_FIELDS",
    "RunManifest",
    "make_manifest",
    "format_run_row",
    "render_run_table",
    "render_summary",
    "emit_series",
    "series_values",
    "export_results",
    "results_to_json",
    "results_to_csv",
    "load_results_json",
]

SCHEMA = "cfo-results/1"

CSV_FIELDS = (
    "run_number",
    "gamma",
    "nt",
    "nd",
    "np",
    "g",
    "delta_t",
    "alpha",
    "beta",
    "last_step",
    "neval",
    "frep_final",
    "best_fitness",
    "best_probe",
    "best_step",
    "ipd_kind",
    "probes_per_axis",
)

TABLE_HEADER = (
    "Run #",
    "Gamma",
    "Nt",
    "Nd",
    "Np",
    "G",
    "DelT",
    "Alpha",
    "Beta",
    "#Steps",
    "Neval",
    "Frep",
    "Fitness",
    "Initial Probes",
)

SERIES_KINDS = ("best-fitness", "davg", "best-probe")


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    function_id: str
    config: dict = field(default_factory=dict)
    version: str = __version__

    def header_lines(self) -> List[str]:
        return [
            f"run_id: {self.run_id}",
            f"function: {self.function_id}",
            f"version: {self.version}",
            "config: " + json.dumps(self.config, sort_keys=True, separators=(",", ":")),
        ]

    def as_dict(self) -> dict:
        return asdict(self)


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp so repeated exports are identical
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def make_manifest(function_id: str, config: Optional[dict] = None, run_id: Optional[str] = None) -> RunManifest:
    return RunManifest(run_id=run_id or _timestamp(), function_id=function_id, config=dict(config or {}))


def _fixed(value: float, places: int) -> str:
    text = f"{value:.{places}f}"
    if text.startswith("-") and not text.strip("-0."):
        text = text[1:]
    return text


def _row_tokens(rec: RunRecord) -> List[str]:
    return [
        str(rec.run_number),
        _fixed(rec.gamma, 3),
        str(rec.nt),
        str(rec.nd),
        str(rec.np),
        _fixed(rec.g, 1),
        _fixed(rec.delta_t, 1),
        _fixed(rec.alpha, 2),
        _fixed(rec.beta, 2),
        str(rec.last_step),
        str(rec.neval),
        _fixed(rec.frep_final, 5) + "V",
        _fixed(rec.best_fitness, 8),
        rec.ipd_kind,
    ]


def format_run_row(rec: RunRecord) -> str:
    """One run as a single line with two-space column gaps."""
    return "  ".join(_row_tokens(rec))


def _align(rows: Sequence[Sequence[str]]) -> List[str]:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = []
    for r in rows:
        cells = [r[c].rjust(widths[c]) if c < len(r) - 1 else r[c] for c in range(len(r))]
        lines.append("  ".join(cells).rstrip())
    return lines


def render_run_table(sweep: SweepResult, manifest: Optional[RunManifest] = None) -> str:
    """Column-aligned run table; the final line repeats the best run."""
    out = []
    if manifest is not None:
        out.extend("# " + line for line in manifest.header_lines())
    out.append(f"FUNCTION: {sweep.function_id}")
    body = [list(TABLE_HEADER)] + [_row_tokens(r) for r in sweep.records]
    best = sweep.best_record
    if best is not None:
        shown = sweep.rerun_record or best
        # the re-run carries the best run's number
        body.append(_row_tokens(_renumber(shown, best.run_number)))
    lines = _align(body)
    if best is not None:
        out.extend(lines[:-1])
    else:
        out.extend(lines)
    out.append("")
    out.append(f"Total Function Evaluations: {sweep.total_neval}")
    if best is not None:
        out.append("")
        out.append(lines[-1])
    if not sweep.valid:
        out.append(f"# INVALID: {sweep.error}")
    return "\n".join(out) + "\n"


def _renumber(rec: RunRecord, n: int) -> RunRecord:
    d = rec.as_dict()
    d["run_number"] = n
    return RunRecord(**d)


def render_summary(sweep: SweepResult) -> str:
    from .sweep import table1_row

    if sweep.best_record is None:
        return f"{sweep.function_id}: no runs\n"
    row = table1_row(sweep)
    return (
        f"{sweep.function_id}: best fitness {_fixed(row.best_fitness, 8)}"
        f"  gamma {row.gamma:.1f}  Np/Nd {row.probes_per_axis}"
        f"  Neval best run {row.neval_best}  total {row.neval_total}\n"
    )


def series_values(trace: Sequence[TraceRecord], kind: str) -> List[tuple]:
    if kind not in SERIES_KINDS:
        raise ConfigurationError(f"series kind must be one of {SERIES_KINDS}, got {kind!r}")
    if kind == "best-fitness":
        return [(t.step, t.global_best) for t in trace]
    if kind == "davg":
        return [(t.step, t.davg) for t in trace]
    return [(t.step, t.best_probe) for t in trace]


def emit_series(trace: Optional[Sequence[TraceRecord]], kind: str, path, manifest: Optional[RunManifest] = None) -> Path:
    """Write a two-column ``step value`` file for steps 0..last_step."""
    if not trace:
        raise ConfigurationError("no trace recorded; run with tracing enabled")
    rows = series_values(trace, kind)
    lines = []
    if manifest is not None:
        lines.extend("# " + line for line in manifest.header_lines())
    lines.append(f"# series: {kind}")
    lines.append("# step value")
    for step, value in rows:
        lines.append(f"{step} {value!r}" if isinstance(value, float) else f"{step} {value}")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def _record_dict(rec: Optional[RunRecord]):
    return None if rec is None else {k: getattr(rec, k) for k in CSV_FIELDS}


def results_to_json(sweep: SweepResult, manifest: RunManifest) -> str:
    doc = {
        "schema": SCHEMA,
        "manifest": manifest.as_dict(),
        "function": sweep.function_id,
        "valid": sweep.valid,
        "error": sweep.error,
        "total_neval": sweep.total_neval,
        "best_run_number": sweep.best_run_number,
        "records": [_record_dict(r) for r in sweep.records],
        "best_record": _record_dict(sweep.best_record),
        "rerun_record": _record_dict(sweep.rerun_record),
    }
    return json.dumps(doc, indent=2) + "\n"


def results_to_csv(sweep: SweepResult, manifest: RunManifest) -> str:
    buf = io.StringIO(newline="")
    for line in manifest.header_lines():
        buf.write("# " + line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in sweep.records:
        writer.writerow([_csv_cell(getattr(rec, k)) for k in CSV_FIELDS])
    return buf.getvalue()


def _csv_cell(v):
    return repr(v) if isinstance(v, float) else v


def export_results(sweep: SweepResult, fmt: str, path, manifest: RunManifest) -> Path:
    if fmt == "csv":
        text = results_to_csv(sweep, manifest)
    elif fmt == "json":
        text = results_to_json(sweep, manifest)
    else:
        raise ConfigurationError(f"export format must be csv or json, got {fmt!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _record_from(d) -> Optional[RunRecord]:
    return None if d is None else RunRecord(**d)


def load_results_json(path_or_text) -> tuple:
    """Parse an exported JSON document back into ``(SweepResult, RunManifest)``."""
    text = path_or_text
    if isinstance(path_or_text, Path) or (isinstance(path_or_text, str) and not path_or_text.lstrip().startswith("{")):
        text = Path(path_or_text).read_text(encoding="utf-8")
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ConfigurationError(f"unsupported schema {doc.get('schema')!r}")
    manifest = RunManifest(**doc["manifest"])
    sweep = SweepResult(
        function_id=doc["function"],
        config=None,
        records=[_record_from(r) for r in doc["records"]],
        total_neval=doc["total_neval"],
        best_run_number=doc["best_run_number"],
        best_record=_record_from(doc["best_record"]),
        rerun_record=_record_from(doc["rerun_record"]),
        valid=doc["valid"],
        error=doc["error"],
    )
    return sweep, manifest
