"""The probes-per-axis x gamma grid of runs for one benchmark."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from .benchmarks import get_benchmark
from .engine import CfoParams, RunRecord, run_single
from .errors import CfoError, ConfigurationError

__all__ = ["SweepConfig", "SweepResult", "run_sweep", "table1_row", "Table1Row", "REFERENCE_PROFILE"]

log = logging.getLogger(__name__)

# Numerical settings under which the published per-run tables are reproduced
# most closely: 80-bit arithmetic, the tighter saturation threshold, and
# coincident probes treated as the reference build did (NaN, then retrieved).
REFERENCE_PROFILE = {"precision": "extended", "sat_tol": 1e-6, "coincident": "retrieve"}


@dataclass(frozen=True)
class SweepConfig:
    function_id: str
    probes_per_axis_min: int = 2
    probes_per_axis_max: int = 6
    probes_per_axis_step: int = 2
    gamma_start: float = 0.0
    gamma_stop: float = 1.0
    gamma_count: int = 11
    base: CfoParams = field(default_factory=CfoParams)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        get_benchmark(self.function_id)
        if self.probes_per_axis_min < 2 or self.probes_per_axis_max < self.probes_per_axis_min:
            raise ConfigurationError("malformed probes-per-axis range")
        if self.probes_per_axis_step < 1:
            raise ConfigurationError("probes-per-axis step must be positive")
        if self.gamma_count < 1:
            raise ConfigurationError("gamma_count must be at least 1")
        for g in self.gammas():
            if not 0.0 <= g <= 1.0:
                raise ConfigurationError(f"gamma grid leaves [0, 1]: {g}")

    @classmethod
    def paper_grid(cls, function_id, base: Optional[CfoParams] = None, **overrides) -> "SweepConfig":
        """The standard grid: 2..6 (F1-F13) or 2..14 (F14-F23) probes per
        axis by 2, gamma 0..1 in 11 steps, 1000 steps (100 for F7).

        Without ``base`` the run parameters use ``REFERENCE_PROFILE``; a given
        ``base`` is kept as is apart from ``nt``.
        """
        b = get_benchmark(function_id)
        base = base or CfoParams(**REFERENCE_PROFILE)
        base = replace(base, nt=b.nt)
        return cls(
            function_id=b.id,
            probes_per_axis_min=2,
            probes_per_axis_max=b.max_probes_per_axis,
            probes_per_axis_step=2,
            base=base,
            **overrides,
        )

    def gammas(self) -> List[float]:
        if self.gamma_count == 1:
            return [self.gamma_start]
        span = self.gamma_stop - self.gamma_start
        return [self.gamma_start + k * span / (self.gamma_count - 1) for k in range(self.gamma_count)]

    def probes_per_axis(self) -> List[int]:
        return list(range(self.probes_per_axis_min, self.probes_per_axis_max + 1, self.probes_per_axis_step))

    def grid(self) -> List[Tuple[int, int, float]]:
        """``(run_number, probes_per_axis, gamma)`` in sweep order."""
        out = []
        n = 1
        for ppa in self.probes_per_axis():
            for g in self.gammas():
                out.append((n, ppa, g))
                n += 1
        return out

    def as_dict(self) -> dict:
        d = asdict(self)
        d["base"] = asdict(self.base)
        return d


@dataclass
class SweepResult:
    function_id: str
    config: SweepConfig
    records: List[RunRecord]
    total_neval: int
    best_run_number: int
    best_record: Optional[RunRecord]
    rerun_record: Optional[RunRecord]
    valid: bool = True
    error: Optional[str] = None
    best_trace: Optional[list] = None


@dataclass(frozen=True)
class Table1Row:
    best_fitness: float
    gamma: float
    probes_per_axis: int
    neval_best: int
    neval_total: int

    def as_tuple(self):
        return (self.best_fitness, self.gamma, self.probes_per_axis, self.neval_best, self.neval_total)


def _run_seed(seed: int, run_number: int):
    return np.random.SeedSequence([seed, run_number])


def _one(args, trace: bool = False):
    function_id, params, run_number, seed = args
    rng = None
    if get_benchmark(function_id).stochastic:
        rng = np.random.default_rng(_run_seed(seed, run_number))
    result = run_single(function_id, params, run_number=run_number, rng=rng, trace=trace)
    return result if trace else result.record


def run_sweep(config: SweepConfig, trace_best: bool = False) -> SweepResult:
    """Run every grid point, then re-run the best one.

    With ``trace_best`` the re-run records per-step diagnostics into
    ``SweepResult.best_trace``.
    """
    jobs = [
        (config.function_id, replace(config.base, probes_per_axis=ppa, gamma=g), n, config.seed)
        for n, ppa, g in config.grid()
    ]
    records: List[RunRecord] = []
    error = None
    try:
        if config.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                records = list(pool.map(_one, jobs))
        else:
            for job in jobs:
                records.append(_one(job))
                log.debug("run %d done", job[2])
    except (CfoError, ArithmeticError, ValueError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        log.error("sweep of %s aborted: %s", config.function_id, error)

    records.sort(key=lambda rec: rec.run_number)
    total = sum(rec.neval for rec in records)

    best = None
    for rec in records:
        if best is None or rec.best_fitness >= best.best_fitness:
            best = rec

    rerun = None
    best_trace = None
    if best is not None and error is None:
        job = next(j for j in jobs if j[2] == best.run_number)
        if trace_best:
            res = _one(job, trace=True)
            rerun, best_trace = res.record, res.trace
        else:
            rerun = _one(job)

    return SweepResult(
        function_id=config.function_id,
        config=config,
        records=records,
        total_neval=total,
        best_run_number=best.run_number if best else 0,
        best_record=best,
        rerun_record=rerun,
        valid=error is None,
        error=error,
        best_trace=best_trace,
    )


def table1_row(sweep: SweepResult, benchmark=None) -> Table1Row:
    if benchmark is not None and get_benchmark(benchmark).id != sweep.function_id:
        raise ConfigurationError("sweep was run for a different benchmark")
    best = sweep.best_record
    if best is None:
        raise ConfigurationError("sweep produced no records")
    return Table1Row(
        best_fitness=best.best_fitness,
        gamma=best.gamma,
        probes_per_axis=best.np // best.nd,
        neval_best=best.neval,
        neval_total=sweep.total_neval,
    )
