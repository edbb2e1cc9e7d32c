"""Command line entry point: ``cfo list-functions | run | sweep | verify``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
mismatch, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from . import __version__
from .benchmarks import FUNCTION_IDS, get_benchmark, registry_manifest
from .engine import COINCIDENT_MODES, CfoParams
from .errors import CfoError, ConfigurationError, UnknownFunctionError
from .sweep import REFERENCE_PROFILE, SweepConfig, run_sweep

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
EXIT_RUNTIME = 3

log = logging.getLogger("cfo")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_numeric(p: argparse.ArgumentParser) -> None:
    # None means "not given", so presets can tell explicit values apart
    g = p.add_argument_group("run parameters")
    g.add_argument("--nt", type=int, help="maximum number of time steps (default: 1000, 100 for F7)")
    g.add_argument("--g", type=float, dest="grav", help="gravitational constant G (default 2)")
    g.add_argument("--alpha", type=float, help="mass exponent (default 2)")
    g.add_argument("--beta", type=float, help="distance exponent (default 2)")
    g.add_argument("--dt", type=float, help="time step (default 1)")
    g.add_argument("--frep", type=float, help="initial repositioning factor (default 0.5)")
    g.add_argument("--dfrep", type=float, help="repositioning factor increment (default 0.05)")
    g.add_argument("--sat-tol", type=float, help="fitness saturation threshold")
    g.add_argument("--precision", choices=("double", "extended"), help="floating point width")
    g.add_argument("--coincident", choices=COINCIDENT_MODES, help="handling of probes at identical positions")
    g.add_argument("--seed", type=int, default=0, help="seed for the noisy benchmark F7 (default 0)")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "csv", "json"), default="text", help="stdout format")
    p.add_argument("--out", type=Path, help="directory for tables, exports and figures")
    p.add_argument("--run-id", help="identifier stored in every output header (default: UTC timestamp)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for a sweep (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfo", description="Deterministic Central Force Optimization on the 23-function suite.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("list-functions", help="list the benchmark functions")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("run", help="one run, or a gamma and/or probe-count sweep")
    p.add_argument("--function", required=True, help="benchmark id, F1..F23")
    gg = p.add_mutually_exclusive_group()
    gg.add_argument("--gamma", type=float, help="initial probe placement along each axis, 0..1 (default 0.5)")
    gg.add_argument("--gamma-sweep", action="store_true", help="gamma 0.0..1.0 in steps of 0.1")
    pg = p.add_mutually_exclusive_group()
    pg.add_argument("--probes-per-axis", type=int, help="probes per axis, even (default 2)")
    pg.add_argument("--ppa-sweep", action="store_true", help="probes per axis 2, 4, ... up to the benchmark maximum")
    p.add_argument("--trace", action="store_true", help="write per-step series of the best run (needs --out)")
    _add_numeric(p)
    _add_output(p)

    p = sub.add_parser("sweep", help="full grid for one function")
    p.add_argument("--function", required=True)
    p.add_argument(
        "--paper-grid",
        action="store_true",
        help="use the reference numerical profile (%s)" % ", ".join(f"{k}={v}" for k, v in REFERENCE_PROFILE.items()),
    )
    p.add_argument("--trace", action="store_true", help="write per-step series of the best run (needs --out)")
    _add_numeric(p)
    _add_output(p)

    p = sub.add_parser("verify", help="run the reference grid and compare with the published results")
    p.add_argument("--function", required=True, help="benchmark id, or 'all'")
    _add_numeric(p)
    _add_output(p)
    return parser


def _params(args, base: CfoParams) -> CfoParams:
    changes = {}
    for attr, key in (
        ("nt", "nt"),
        ("grav", "g"),
        ("alpha", "alpha"),
        ("beta", "beta"),
        ("dt", "delta_t"),
        ("frep", "frep_init"),
        ("dfrep", "delta_frep"),
        ("sat_tol", "sat_tol"),
        ("precision", "precision"),
        ("coincident", "coincident"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            changes[key] = value
    return replace(base, **changes)


def _config(args) -> SweepConfig:
    bench = get_benchmark(args.function)
    if args.command == "run":
        base = _params(args, CfoParams(nt=bench.nt))
        cfg = _grid(bench.id, base, args)
        if not args.ppa_sweep:
            ppa = args.probes_per_axis if args.probes_per_axis is not None else 2
            replace(cfg.base, probes_per_axis=ppa).validate_for(bench.nd)
            cfg = replace(cfg, probes_per_axis_min=ppa, probes_per_axis_max=ppa)
        if not args.gamma_sweep:
            gamma = args.gamma if args.gamma is not None else 0.5
            cfg = replace(cfg, gamma_start=gamma, gamma_stop=gamma, gamma_count=1)
        return cfg
    reference = args.command == "verify" or getattr(args, "paper_grid", False)
    seed_params = CfoParams(**REFERENCE_PROFILE) if reference else CfoParams()
    base = _params(args, replace(seed_params, nt=bench.nt))
    return _grid(bench.id, base, args)


def _grid(function_id: str, base: CfoParams, args) -> SweepConfig:
    cfg = SweepConfig.paper_grid(function_id, base=base, seed=args.seed, workers=args.workers)
    # the grid resets nt to the benchmark's own; an explicit --nt wins
    if args.nt is not None:
        cfg = replace(cfg, base=replace(cfg.base, nt=args.nt))
    return cfg


def _write_outputs(sweep, manifest, out: Path, trace) -> List[Path]:
    from .plotting import plot_run_diagnostics, plot_sweep
    from .report import SERIES_KINDS, emit_series, export_results, render_run_table

    out.mkdir(parents=True, exist_ok=True)
    stem = sweep.function_id.lower()
    written = []
    table = out / f"{stem}_runs.txt"
    table.write_text(render_run_table(sweep, manifest), encoding="utf-8", newline="\n")
    written.append(table)
    written.append(export_results(sweep, "csv", out / f"{stem}_runs.csv", manifest))
    written.append(export_results(sweep, "json", out / f"{stem}_runs.json", manifest))
    if sweep.records:
        written.append(plot_sweep(sweep, out / f"{stem}_sweep.png", f"{sweep.function_id}: sweep"))
    if trace:
        for kind in SERIES_KINDS:
            written.append(emit_series(trace, kind, out / f"{stem}_{kind}.txt", manifest))
        best = sweep.best_record
        title = f"{sweep.function_id} run {best.run_number}" if best else sweep.function_id
        written.extend(plot_run_diagnostics(trace, out, stem, title).values())
    return written


def _emit(sweep, manifest, fmt: str) -> None:
    from .report import render_run_table, results_to_csv, results_to_json

    if fmt == "csv":
        sys.stdout.write(results_to_csv(sweep, manifest))
    elif fmt == "json":
        sys.stdout.write(results_to_json(sweep, manifest))
    else:
        sys.stdout.write(render_run_table(sweep, manifest))


def _cmd_list(args) -> int:
    rows = registry_manifest()
    if args.format == "json":
        sys.stdout.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    for r in rows:
        lo, hi = r["bounds"][0]
        box = f"[{lo:g}, {hi:g}]" if all(b == [lo, hi] for b in r["bounds"]) else "per-axis"
        note = "  noisy" if r["stochastic"] else ""
        sys.stdout.write(f"{r['id']:<4} {r['name']:<26} nd={r['nd']:<3} {box:<18} f_max={r['f_max']:<10g} nt={r['nt']}{note}\n")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .report import make_manifest

    cfg = _config(args)
    trace = getattr(args, "trace", False)
    if trace and args.out is None:
        raise ConfigurationError("--trace needs --out DIR")
    sweep = run_sweep(cfg, trace_best=trace)
    manifest = make_manifest(cfg.function_id, cfg.as_dict(), args.run_id)
    _emit(sweep, manifest, args.format)
    if args.out is not None:
        for path in _write_outputs(sweep, manifest, args.out, sweep.best_trace):
            log.info("wrote %s", path)
    if not sweep.valid:
        sys.stderr.write(f"cfo: sweep invalid: {sweep.error}\n")
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .golden import compare_sweep
    from .report import make_manifest, render_summary

    ids = FUNCTION_IDS if args.function.lower() == "all" else [get_benchmark(args.function).id]
    status = EXIT_OK
    for fid in ids:
        args.function = fid
        cfg = _config(args)
        sweep = run_sweep(cfg)
        manifest = make_manifest(fid, cfg.as_dict(), args.run_id)
        report = compare_sweep(sweep)
        if args.format == "json":
            doc = {
                "function": fid,
                "passed": report.passed,
                "checks": [c.__dict__ for c in report.checks],
                "summary": render_summary(sweep).strip(),
            }
            sys.stdout.write(json.dumps(doc) + "\n")
        else:
            sys.stdout.write(render_summary(sweep))
            sys.stdout.write(report.render())
        if args.out is not None:
            _write_outputs(sweep, manifest, args.out, None)
        if not sweep.valid:
            status = EXIT_RUNTIME
        elif not report.passed and status == EXIT_OK:
            status = EXIT_MISMATCH
    return status


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and --version exit 0, usage errors exit 1 via _Parser.error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    handlers = {"list-functions": _cmd_list, "run": _cmd_sweep, "sweep": _cmd_sweep, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except (UnknownFunctionError, ConfigurationError) as exc:
        sys.stderr.write(f"cfo: error: {exc}\n")
        return EXIT_USAGE
    except (CfoError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"cfo: failed: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
