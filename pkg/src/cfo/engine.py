"""Single-run Central Force Optimization engine.

Probes are numbered from 1 and steps from 0 in everything that leaves this
module (records, traces, tie-break results), matching the run tables.
Internally arrays are 0-based: ``r[j]`` has shape ``(np, nd)`` and ``m[j]``
has shape ``(np,)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np

from .benchmarks import Benchmark, get_benchmark
from .errors import ConfigurationError

__all__ = [
    "IPD_KIND",
    "DecisionSpace",
    "CfoParams",
    "RunState",
    "RunRecord",
    "TraceRecord",
    "RunResult",
    "working_dtype",
    "unit_step",
    "initial_probe_distribution",
    "compute_accelerations",
    "step_positions",
    "retrieve_errant_probes",
    "update_frep",
    "shrink_space",
    "best_fitness_so_far",
    "fitness_saturated",
    "davg",
    "davg_oscillating",
    "davg_saturated",
    "bounds_volume",
    "run_single",
]

IPD_KIND = "UNIFORM P-AXIS"

_PRECISIONS = {"double": np.float64, "extended": np.longdouble}

# How a pair of probes at the same point is handled.  "skip" drops the
# pair's term.  "retrieve" lets the 0/0 term poison the probe's acceleration;
# the resulting not-a-number coordinates are then pulled back by retrieval as
# if they were below the lower bound.
COINCIDENT_MODES = ("skip", "retrieve")


def working_dtype(precision: str):
    try:
        return np.dtype(_PRECISIONS[precision])
    except KeyError:
        raise ConfigurationError(f"precision must be one of {sorted(_PRECISIONS)}, got {precision!r}") from None


def _as(value, dtype):
    # go through the decimal text so extended precision sees 0.05, not the
    # nearest double to it
    if np.dtype(dtype) == np.float64:
        return np.float64(value)
    return np.dtype(dtype).type(repr(value) if isinstance(value, float) else str(value))


@dataclass
class DecisionSpace:
    """Current bounds of the decision space plus the starting bounds."""

    x_min: np.ndarray
    x_max: np.ndarray
    start_min: np.ndarray = None
    start_max: np.ndarray = None

    def __post_init__(self):
        self.x_min = np.array(self.x_min, copy=True)
        self.x_max = np.array(self.x_max, copy=True)
        if self.x_min.dtype not in (np.float64, np.longdouble):
            self.x_min = self.x_min.astype(np.float64)
            self.x_max = self.x_max.astype(np.float64)
        if self.x_min.shape != self.x_max.shape or self.x_min.ndim != 1:
            raise ConfigurationError("x_min and x_max must be 1-D arrays of equal length")
        if not np.all(self.x_min < self.x_max):
            raise ConfigurationError("every lower bound must be strictly below its upper bound")
        self.start_min = self.x_min.copy() if self.start_min is None else np.array(self.start_min, dtype=self.x_min.dtype)
        self.start_max = self.x_max.copy() if self.start_max is None else np.array(self.start_max, dtype=self.x_max.dtype)

    @classmethod
    def for_benchmark(cls, benchmark, dtype=np.float64) -> "DecisionSpace":
        b = get_benchmark(benchmark)
        lo = np.array([_as(v, dtype) for v in b.lower], dtype=dtype)
        hi = np.array([_as(v, dtype) for v in b.upper], dtype=dtype)
        return cls(lo, hi)

    @property
    def nd(self) -> int:
        return self.x_min.shape[0]

    @property
    def dtype(self):
        return self.x_min.dtype

    def reset(self) -> None:
        self.x_min = self.start_min.copy()
        self.x_max = self.start_max.copy()

    def diagonal(self):
        """Length of the starting diagonal, used to normalize D_avg."""
        width = self.start_max - self.start_min
        acc = self.dtype.type(0)
        for w in width:
            acc = acc + w * w
        return np.sqrt(acc)

    def copy(self) -> "DecisionSpace":
        return DecisionSpace(self.x_min, self.x_max, self.start_min, self.start_max)


@dataclass(frozen=True)
class CfoParams:
    g: float = 2.0
    alpha: float = 2.0
    beta: float = 2.0
    delta_t: float = 1.0
    frep_init: float = 0.5
    delta_frep: float = 0.05
    gamma: float = 0.5
    probes_per_axis: int = 2
    nt: int = 1000
    shrink_start: int = 20
    shrink_interval: int = 10
    sat_window: int = 25
    sat_tol: float = 1e-5
    sat_guard: int = 10
    precision: str = "double"
    coincident: str = "skip"

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1], got {self.gamma}")
        if int(self.probes_per_axis) != self.probes_per_axis or self.probes_per_axis < 2:
            raise ConfigurationError(f"probes_per_axis must be an integer >= 2, got {self.probes_per_axis}")
        if not 0.0 < self.delta_frep <= self.frep_init <= 1.0:
            raise ConfigurationError("need 0 < delta_frep <= frep_init <= 1")
        if self.nt < 0:
            raise ConfigurationError("nt must be non-negative")
        if self.sat_window < 1 or self.shrink_interval < 1:
            raise ConfigurationError("sat_window and shrink_interval must be positive")
        working_dtype(self.precision)
        if self.coincident not in COINCIDENT_MODES:
            raise ConfigurationError(f"coincident must be one of {COINCIDENT_MODES}, got {self.coincident!r}")

    def validate_for(self, nd: int) -> None:
        if nd == 1 and self.probes_per_axis < 3:
            raise ConfigurationError("one-dimensional problems need at least 3 probes per axis")
        if nd > 1 and self.probes_per_axis % 2:
            raise ConfigurationError("probes_per_axis must be even when nd > 1")

    def with_(self, **changes) -> "CfoParams":
        return replace(self, **changes)


@dataclass
class RunState:
    """Histories of one run.  ``r``, ``a`` and ``m`` are lists indexed by step."""

    r: List[np.ndarray] = field(default_factory=list)
    a: List[np.ndarray] = field(default_factory=list)
    m: List[np.ndarray] = field(default_factory=list)
    frep: float = 0.5
    step: int = 0
    best_fitness: float = -math.inf
    best_probe: int = 0
    best_step: int = 0
    best_position: Optional[np.ndarray] = None
    step_best: List = field(default_factory=list)
    davg_series: List = field(default_factory=list)
    bounds: List = field(default_factory=list)  # (x_min, x_max) in force after each step

    @property
    def np(self) -> int:
        return self.r[0].shape[0]

    @property
    def nd(self) -> int:
        return self.r[0].shape[1]

    def fitness_matrix(self) -> np.ndarray:
        """Fitness as an ``(np, steps)`` array (probe-major, like the source)."""
        return np.stack(self.m, axis=1)

    def positions(self) -> np.ndarray:
        """Positions as ``(steps, np, nd)``."""
        return np.stack(self.r)


@dataclass(frozen=True)
class RunRecord:
    run_number: int
    gamma: float
    nt: int
    nd: int
    np: int
    g: float
    delta_t: float
    alpha: float
    beta: float
    last_step: int
    neval: int
    frep_final: float
    best_fitness: float
    best_probe: int
    best_step: int
    ipd_kind: str = IPD_KIND
    probes_per_axis: int = 0

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class TraceRecord:
    step: int
    frep: float
    step_best: float
    global_best: float
    davg: float
    volume: float
    best_probe: int = 0


@dataclass
class RunResult:
    record: RunRecord
    trace: Optional[List[TraceRecord]] = None
    state: Optional[RunState] = None
    best_position: Optional[np.ndarray] = None
    best_probe_series: Optional[List[np.ndarray]] = None


# ----------------------------------------------------------------------------
# Elementary operations
# ----------------------------------------------------------------------------


def unit_step(z) -> int:
    return 1 if z >= 0 else 0


def initial_probe_distribution(space: DecisionSpace, probes_per_axis: int, gamma) -> np.ndarray:
    """Probe lines parallel to each axis, crossing at the point a fraction
    ``gamma`` along the main diagonal.  Returns an ``(np, nd)`` array."""
    ppa = int(probes_per_axis)
    if ppa < 2:
        raise ConfigurationError("probes_per_axis must be at least 2")
    if not 0 <= gamma <= 1:
        raise ConfigurationError(f"gamma must lie in [0, 1], got {gamma}")
    lo, hi = space.x_min, space.x_max
    nd = space.nd
    if nd == 1 and ppa < 3:
        raise ConfigurationError("one-dimensional problems need at least 3 probes per axis")
    gamma = _as(gamma, lo.dtype) if isinstance(gamma, (float, int)) else gamma
    r = np.empty((ppa * nd, nd), dtype=lo.dtype)
    r[:] = lo + gamma * (hi - lo)
    for i in range(nd):
        delta = (hi[i] - lo[i]) / (ppa - 1)
        for k in range(ppa):
            r[k + ppa * i, i] = lo[i] + k * delta
    return r


def _mass(diff, alpha):
    # (M_k - M_p)^alpha for positive differences only; a zero or negative
    # difference carries no mass whatever alpha is
    pos = diff > 0
    out = np.zeros_like(diff)
    out[pos] = diff[pos] ** alpha
    return out


def compute_accelerations(r: np.ndarray, m: np.ndarray, g, alpha, beta, coincident: str = "skip") -> np.ndarray:
    """Accelerations of all probes from positions ``r`` (np, nd) and fitness ``m`` (np,).

    With ``coincident="retrieve"`` a probe sharing its position with another
    gets a not-a-number acceleration on every axis instead of a skipped term.
    """
    n, nd = r.shape
    dt = r.dtype
    g, alpha, beta = (_as(v, dt) if isinstance(v, (float, int)) else v for v in (g, alpha, beta))
    sumsq = np.zeros((n, n), dtype=dt)
    for L in range(nd):
        d = r[:, L][None, :] - r[:, L][:, None]
        sumsq = sumsq + d * d
    denom = np.sqrt(sumsq)
    with np.errstate(invalid="ignore"):
        diff = m[None, :] - m[:, None]
    num = _mass(diff, alpha)
    coef = np.zeros((n, n), dtype=dt)
    live = (denom > 0) & (num > 0)
    coef[live] = g * num[live] / denom[live] ** beta
    acc = np.zeros((n, nd), dtype=dt)
    with np.errstate(invalid="ignore"):
        for k in range(n):
            c = coef[:, k]
            if not c.any():
                continue
            acc = acc + c[:, None] * (r[k][None, :] - r)
    if coincident == "retrieve":
        clash = (denom == 0) | np.isnan(diff)
        np.fill_diagonal(clash, False)
        acc[clash.any(axis=1)] = np.nan
    return acc


def step_positions(r_prev: np.ndarray, a_prev: np.ndarray, delta_t) -> np.ndarray:
    dt = r_prev.dtype
    half = _as("0.5", dt)
    delta_t = _as(delta_t, dt) if isinstance(delta_t, (float, int)) else delta_t
    with np.errstate(invalid="ignore"):
        return r_prev + half * a_prev * delta_t**2


def retrieve_errant_probes(r: np.ndarray, r_prev: np.ndarray, space: DecisionSpace, frep) -> np.ndarray:
    """Pull out-of-bounds coordinates back inside, using the previous step's
    position as the anchor.  Returns a corrected copy.

    A not-a-number coordinate is treated as lying below the lower bound.
    """
    frep = _as(frep, r.dtype) if isinstance(frep, (float, int)) else frep
    lo, hi = space.x_min, space.x_max
    out = r.copy()
    below = (out < lo) | np.isnan(out)
    if below.any():
        cand = np.maximum(lo + frep * (r_prev - lo), lo)
        out[below] = np.broadcast_to(cand, out.shape)[below]
    above = out > hi
    if above.any():
        cand = np.minimum(hi - frep * (hi - r_prev), hi)
        out[above] = np.broadcast_to(cand, out.shape)[above]
    return out


def update_frep(frep, delta_frep):
    frep = frep + delta_frep
    if frep > 1:
        frep = delta_frep
    return frep


def shrink_space(space: DecisionSpace, r_best) -> DecisionSpace:
    """Halve the distance from ``r_best`` to every boundary, in place."""
    r_best = np.asarray(r_best, dtype=space.dtype)
    space.x_min = space.x_min + (r_best - space.x_min) / 2
    space.x_max = space.x_max - (space.x_max - r_best) / 2
    return space


def best_fitness_so_far(m, step: Optional[int] = None):
    """Global best over steps ``0..step`` of a fitness matrix ``m[p][k]``.

    Ties go to the entry scanned last (steps outer, probes inner), so the
    latest step and then the highest probe number wins.  Returns
    ``(fitness, probe, step)`` with a 1-based probe number.
    """
    m = np.asarray(m)
    last = m.shape[1] - 1 if step is None else step
    best = m[0, 0]
    bp, bs = 1, 0
    for k in range(last + 1):
        top, idx = _last_max(m[:, k])
        if top >= best:
            best = top
            bp = idx + 1
            bs = k
    return best, bp, bs


def _last_max(m):
    # largest entry and the highest index attaining it; not-a-number entries
    # never win, and an all-NaN vector reports NaN at index 0
    ok = ~np.isnan(m)
    if not ok.any():
        return m[0], 0
    top = m[ok].max()
    return top, int(np.flatnonzero(m == top)[-1])


def fitness_saturated(step_best, j: int, window: int = 25, tol: float = 1e-5, guard: int = 10) -> bool:
    """Has the per-step best fitness flattened out?

    ``step_best[k]`` is the best fitness among the probes at step ``k``.
    """
    if j < window + guard:
        return False
    acc = 0 * step_best[j]
    for k in range(j - window + 1, j + 1):
        acc = acc + step_best[k]
    return bool(abs(acc / window - step_best[j]) <= tol)


def davg(r_j: np.ndarray, best_position: np.ndarray, diag) -> float:
    """Average distance of all probes to the best position, normalized by the
    starting diagonal and by ``np - 1``."""
    n = r_j.shape[0]
    if n < 2:
        raise ConfigurationError("D_avg needs at least two probes")
    d = r_j - best_position
    sumsq = np.zeros(n, dtype=r_j.dtype)
    for i in range(r_j.shape[1]):
        sumsq = sumsq + d[:, i] * d[:, i]
    total = r_j.dtype.type(0)
    for v in np.sqrt(sumsq):
        total = total + v
    return total / (diag * (n - 1))


def davg_oscillating(series, j: int) -> bool:
    if j < 15:
        return False
    changes = 0
    for k in range(j - 10, j):
        if (series[k] - series[k - 1]) * (series[k + 1] - series[k]) < 0:
            changes += 1
    return changes >= 3


def davg_saturated(series, j: int, window: int = 25, tol: float = 0.0005, guard: int = 10) -> bool:
    return fitness_saturated(series, j, window, tol, guard)


def bounds_volume(space: DecisionSpace) -> float:
    vol = 1.0
    for w in space.x_max - space.x_min:
        vol *= float(w)
    return vol


# ----------------------------------------------------------------------------
# The run loop
# ----------------------------------------------------------------------------


def run_single(
    benchmark,
    params: CfoParams,
    space: Optional[DecisionSpace] = None,
    *,
    run_number: int = 1,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
    trace: bool = False,
    keep_history: bool = False,
) -> RunResult:
    """Execute one CFO run.

    ``space`` defaults to the benchmark's starting bounds; if given it is
    reset to its starting bounds first and left shrunken afterwards.  F7
    needs ``rng`` or ``seed``.  With ``trace`` a per-step diagnostics series
    is returned, with ``keep_history`` the whole :class:`RunState`.
    """
    bench: Benchmark = get_benchmark(benchmark)
    dtype = working_dtype(params.precision)
    params.validate_for(bench.nd)
    if space is None:
        space = DecisionSpace.for_benchmark(bench, dtype)
    else:
        space.reset()
        if space.dtype != dtype:
            space = DecisionSpace(space.start_min.astype(dtype), space.start_max.astype(dtype))
    if space.nd != bench.nd:
        raise ConfigurationError(f"{bench.id} has {bench.nd} dimensions, the space has {space.nd}")
    if bench.stochastic and rng is None:
        if seed is None:
            raise ConfigurationError(f"{bench.id} is stochastic; pass a seed or a generator")
        rng = np.random.default_rng(seed)

    g = _as(params.g, dtype)
    alpha = _as(params.alpha, dtype)
    beta = _as(params.beta, dtype)
    delta_t = _as(params.delta_t, dtype)
    dfrep = _as(params.delta_frep, dtype)
    frep = _as(params.frep_init, dtype)
    gamma = _as(params.gamma, dtype)
    sat_tol = _as(params.sat_tol, dtype)
    diag = space.diagonal()

    def fitness(x):
        with np.errstate(all="ignore"):
            return bench.evaluate_batch(x, rng)

    r = initial_probe_distribution(space, params.probes_per_axis, gamma)
    n = r.shape[0]
    m = fitness(r)
    a = np.zeros_like(r)

    state = RunState(frep=frep)
    if keep_history:
        state.r.append(r)
        state.a.append(a)
        state.m.append(m)
        state.bounds.append((space.x_min.copy(), space.x_max.copy()))

    best, best_probe = _last_max(m)
    step_best = [best]
    best_step = 0
    best_pos = r[best_probe].copy()

    diag_on = trace or keep_history
    davg_series = []
    trace_rows = []
    best_probe_series = []

    def record_diagnostics(j, frep_now):
        if not diag_on:
            return
        d = davg(r, best_pos, diag)
        davg_series.append(d)
        best_probe_series.append(best_pos.copy())
        trace_rows.append(
            TraceRecord(
                step=j,
                frep=float(frep_now),
                step_best=float(step_best[j]),
                global_best=float(best),
                davg=float(d),
                volume=bounds_volume(space),
                best_probe=best_probe + 1,
            )
        )

    record_diagnostics(0, frep)
    last_step = params.nt

    for j in range(1, params.nt + 1):
        r_prev = r
        r = step_positions(r_prev, a, delta_t)
        r = retrieve_errant_probes(r, r_prev, space, frep)
        m = fitness(r)
        a = compute_accelerations(r, m, g, alpha, beta, params.coincident)

        top, idx = _last_max(m)
        step_best.append(top)
        if top >= best:
            best = top
            best_probe = idx
            best_step = j
            best_pos = r[best_probe].copy()

        frep = update_frep(frep, dfrep)

        if j >= params.shrink_start and j % params.shrink_interval == 0:
            shrink_space(space, best_pos)
            # fitness and accelerations at this step stay as computed above
            r = retrieve_errant_probes(r, r_prev, space, frep)

        if keep_history:
            state.r.append(r)
            state.a.append(a)
            state.m.append(m)
            state.bounds.append((space.x_min.copy(), space.x_max.copy()))
        record_diagnostics(j, frep)

        if fitness_saturated(step_best, j, params.sat_window, sat_tol, params.sat_guard):
            last_step = j
            break

    state.frep = frep
    state.step = last_step
    state.best_fitness = best
    state.best_probe = best_probe + 1
    state.best_step = best_step
    state.best_position = best_pos
    state.step_best = step_best
    state.davg_series = davg_series

    record = RunRecord(
        run_number=run_number,
        gamma=float(params.gamma),
        nt=params.nt,
        nd=bench.nd,
        np=n,
        g=float(params.g),
        delta_t=float(params.delta_t),
        alpha=float(params.alpha),
        beta=float(params.beta),
        last_step=last_step,
        neval=(last_step + 1) * n,
        frep_final=float(frep),
        best_fitness=float(best) + 0.0,
        best_probe=best_probe + 1,
        best_step=best_step,
        probes_per_axis=params.probes_per_axis,
    )
    return RunResult(
        record=record,
        trace=trace_rows if trace else None,
        state=state if keep_history else None,
        best_position=best_pos,
        best_probe_series=best_probe_series if diag_on else None,
    )
