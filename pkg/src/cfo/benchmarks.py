"""The 23-function benchmark suite, posed as maximization problems.

Every evaluator is the negative of the classical minimization form, so the
known optima are maxima.  Evaluators work on a batch of points ``X`` with
shape ``(n, nd)`` and return ``n`` fitness values in the dtype of ``X``; all
sums run sequentially along the coordinate axis so that float64 and
extended-precision evaluations follow the same operation order.

F5, F9, F11 and F13 are variants of their textbook definitions:

* F5 squares ``100 (x[i+1] - x[i]**2)**2 + (x[i] - 1)`` as a whole.
* F9 squares the whole Rastrigin term.
* F11 is Griewank shifted by 100 on every axis.
* F13 uses ``sin(3 pi x[0])**2`` for its leading term.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .errors import ConfigurationError, UnknownFunctionError

__all__ = [
    "Benchmark",
    "NoiseSource",
    "SUITE",
    "FUNCTION_IDS",
    "get_benchmark",
    "evaluate",
    "penalty_u",
    "known_optimum",
    "registry_manifest",
    "SHEKEL_FOXHOLES_A",
    "KOWALIK_A",
    "KOWALIK_B",
    "HARTMAN3_A",
    "HARTMAN3_P",
    "HARTMAN6_A",
    "HARTMAN6_P",
    "HARTMAN_C",
    "SHEKEL_A",
    "SHEKEL_C",
]


class NoiseSource(Protocol):
    """Anything that yields uniform draws in [0, 1), e.g. ``numpy.random.Generator``."""

    def random(self, size=None): ...


PI_TEXT = "3.141592653589793238462643"
E_TEXT = "2.718281828459045235360287"


@functools.lru_cache(maxsize=None)
def _lit(text: str, dtype) -> np.generic:
    # decimal literal rounded once, directly into the working precision
    return np.dtype(dtype).type(text)


def _table(rows, dtype) -> np.ndarray:
    # coefficient tables are written as short decimals; re-parse them as text
    # so an extended dtype gets the correctly rounded value, not a widened double
    arr = np.array(rows, dtype=np.float64)
    if np.dtype(dtype) == np.float64:
        return arr
    return np.array([repr(float(v)) for v in arr.ravel()]).astype(dtype).reshape(arr.shape)


def _rowsum(t: np.ndarray) -> np.ndarray:
    acc = np.zeros(t.shape[0], dtype=t.dtype)
    for c in range(t.shape[1]):
        acc = acc + t[:, c]
    return acc


def _rowprod(t: np.ndarray) -> np.ndarray:
    acc = np.ones(t.shape[0], dtype=t.dtype)
    for c in range(t.shape[1]):
        acc = acc * t[:, c]
    return acc


# ----------------------------------------------------------------------------
# Coefficient tables
# ----------------------------------------------------------------------------

_FOX = (-32.0, -16.0, 0.0, 16.0, 32.0)
SHEKEL_FOXHOLES_A = (
    tuple(_FOX * 5),
    tuple(v for v in _FOX for _ in range(5)),
)

KOWALIK_A = (0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246)
# b is stored through its reciprocal, b = 1 / d
KOWALIK_B_INV_DENOM = (0.25, 0.50, 1.00, 2.00, 4.00, 6.00, 8.00, 10.0, 12.0, 14.0, 16.0)
KOWALIK_B = tuple(1.0 / d for d in KOWALIK_B_INV_DENOM)

HARTMAN_C = (1.0, 1.2, 3.0, 3.2)
HARTMAN3_A = (
    (3.0, 10.0, 30.0),
    (0.1, 10.0, 35.0),
    (3.0, 10.0, 30.0),
    (0.1, 10.0, 35.0),
)
HARTMAN3_P = (
    (0.36890, 0.1170, 0.2673),
    (0.46990, 0.4387, 0.7470),
    (0.10910, 0.8732, 0.5547),
    (0.03815, 0.5743, 0.8828),
)
HARTMAN6_A = (
    (10.0, 3.00, 17.0, 3.5, 1.7, 8.0),
    (0.05, 10.0, 17.0, 0.1, 8.0, 14.0),
    (3.00, 3.50, 1.70, 10.0, 17.0, 8.0),
    (17.0, 8.00, 0.05, 10.0, 0.1, 14.0),
)
HARTMAN6_P = (
    (0.13120, 0.1696, 0.5569, 0.01240, 0.8283, 0.5886),
    (0.23290, 0.4135, 0.8307, 0.37360, 0.1004, 0.9991),
    (0.23480, 0.1415, 0.3522, 0.28830, 0.3047, 0.6650),
    (0.40470, 0.8828, 0.8732, 0.57430, 0.1091, 0.0381),
)

SHEKEL_A = (
    (4.0, 4.0, 4.0, 4.0),
    (1.0, 1.0, 1.0, 1.0),
    (8.0, 8.0, 8.0, 8.0),
    (6.0, 6.0, 6.0, 6.0),
    (3.0, 7.0, 3.0, 7.0),
    (2.0, 9.0, 2.0, 9.0),
    (5.0, 5.0, 3.0, 3.0),
    (8.0, 1.0, 8.0, 1.0),
    (6.0, 2.0, 6.0, 2.0),
    (7.0, 3.6, 7.0, 3.6),
)
SHEKEL_C = (0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5)


# ----------------------------------------------------------------------------
# Evaluators
# ----------------------------------------------------------------------------


def penalty_u(x, a, k, m):
    """Boundary penalty shared by F12 and F13.

    ``k (x - a)**m`` above ``a``, ``k (-x - a)**m`` below ``-a``, zero between.
    Works elementwise on arrays and returns a float for scalar input.
    """
    x = np.asarray(x)
    out = np.where(x > a, k * (x - a) ** m, np.where(x < -a, k * (-x - a) ** m, 0 * x))
    return out.item() if out.ndim == 0 else out


def _f1(X, noise):
    return -_rowsum(X**2)


def _f2(X, noise):
    ax = np.abs(X)
    return -(_rowsum(ax) + _rowprod(ax))


def _f3(X, noise):
    return -_rowsum(np.cumsum(X, axis=1) ** 2)


def _f4(X, noise):
    return -np.max(np.abs(X), axis=1)


def _f5(X, noise):
    xi, xn = X[:, :-1], X[:, 1:]
    return -_rowsum((100 * (xn - xi**2) ** 2 + (xi - 1)) ** 2)


def _f6(X, noise):
    return -_rowsum(np.floor(X + _lit("0.5", X.dtype)) ** 2)


def _f7(X, noise):
    if noise is None:
        raise ConfigurationError("F7 needs a noise source (seeded uniform generator)")
    i = np.arange(1, X.shape[1] + 1, dtype=X.dtype)
    draws = np.asarray(noise.random(X.shape[0]), dtype=np.float64).astype(X.dtype)
    return -_rowsum(i * X**4) - draws


def _f8(X, noise):
    z = np.zeros(X.shape[0], dtype=X.dtype)
    for c in range(X.shape[1]):
        x = X[:, c]
        z = z - x * np.sin(np.sqrt(np.abs(x)))
    return -z


def _f9(X, noise):
    two_pi = 2 * _lit(PI_TEXT, X.dtype)
    return -_rowsum((X**2 - 10 * np.cos(two_pi * X) + 10) ** 2)


def _f10(X, noise):
    nd = X.shape[1]
    two_pi = 2 * _lit(PI_TEXT, X.dtype)
    s1 = _rowsum(X**2)
    s2 = _rowsum(np.cos(two_pi * X))
    z = -20 * np.exp(-_lit("0.2", X.dtype) * np.sqrt(s1 / nd)) - np.exp(s2 / nd) + 20 + _lit(E_TEXT, X.dtype)
    return -z


def _f11(X, noise):
    shifted = X - 100
    root_i = np.sqrt(np.arange(1, X.shape[1] + 1, dtype=X.dtype))
    z = _rowsum(shifted**2) / 4000 - _rowprod(np.cos(shifted / root_i)) + 1
    return -z


def _f12(X, noise):
    pi = _lit(PI_TEXT, X.dtype)
    nd = X.shape[1]
    y = 1 + (X + 1) / 4
    s1 = _rowsum((y[:, :-1] - 1) ** 2 * (1 + 10 * np.sin(pi * y[:, 1:]) ** 2))
    s1 = s1 + 10 * np.sin(pi * y[:, 0]) ** 2 + (y[:, -1] - 1) ** 2
    s1 = pi * s1 / nd
    s2 = _rowsum(penalty_u(X, 10, 100, 4))
    return -(s1 + s2)


def _f13(X, noise):
    pi = _lit(PI_TEXT, X.dtype)
    xi, xn, last = X[:, :-1], X[:, 1:], X[:, -1]
    s1 = _rowsum((xi - 1) ** 2 * (1 + np.sin(3 * pi * xn) ** 2))
    s1 = s1 + np.sin(pi * 3 * X[:, 0]) ** 2 + (last - 1) ** 2 * (1 + np.sin(2 * pi * last) ** 2)
    s2 = _rowsum(penalty_u(X, 5, 100, 4))
    return -(s1 / 10 + s2)


def _f14(X, noise):
    a = _table(SHEKEL_FOXHOLES_A, X.dtype)
    s1 = np.zeros(X.shape[0], dtype=X.dtype)
    for j in range(25):
        s2 = _rowsum((X - a[:, j]) ** 6)
        s1 = s1 + 1 / ((j + 1) + s2)
    return -(1 / (_lit("0.002", X.dtype) + s1))


def _f15(X, noise):
    a = _table(KOWALIK_A, X.dtype)
    b = 1 / _table(KOWALIK_B_INV_DENOM, X.dtype)
    x1, x2, x3, x4 = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    z = np.zeros(X.shape[0], dtype=X.dtype)
    for j in range(11):
        num = x1 * (b[j] ** 2 + b[j] * x2)
        den = b[j] ** 2 + b[j] * x3 + x4
        z = z + (a[j] - num / den) ** 2
    return -z


def _f16(X, noise):
    x1, x2 = X[:, 0], X[:, 1]
    z = 4 * x1**2 - _lit("2.1", X.dtype) * x1**4 + x1**6 / 3 + x1 * x2 - 4 * x2**2 + 4 * x2**4
    return -z


def _f17(X, noise):
    pi = _lit(PI_TEXT, X.dtype)
    x1, x2 = X[:, 0], X[:, 1]
    z = (x2 - _lit("5.1", X.dtype) * x1**2 / (4 * pi**2) + 5 * x1 / pi - 6) ** 2
    z = z + 10 * (1 - 1 / (8 * pi)) * np.cos(x1) + 10
    return -z


def _f18(X, noise):
    x1, x2 = X[:, 0], X[:, 1]
    t1 = 1 + (x1 + x2 + 1) ** 2 * (19 - 14 * x1 + 3 * x1**2 - 14 * x2 + 6 * x1 * x2 + 3 * x2**2)
    t2 = 30 + (2 * x1 - 3 * x2) ** 2 * (18 - 32 * x1 + 12 * x1**2 + 48 * x2 - 36 * x1 * x2 + 27 * x2**2)
    return -(t1 * t2)


def _hartman(X, a_rows, p_rows):
    a = _table(a_rows, X.dtype)
    p = _table(p_rows, X.dtype)
    c = _table(HARTMAN_C, X.dtype)
    z = np.zeros(X.shape[0], dtype=X.dtype)
    for j in range(4):
        z = z + c[j] * np.exp(-_rowsum(a[j] * (X - p[j]) ** 2))
    return z


def _f19(X, noise):
    return _hartman(X, HARTMAN3_A, HARTMAN3_P)


def _f20(X, noise):
    return _hartman(X, HARTMAN6_A, HARTMAN6_P)


def _shekel(X, m):
    a = _table(SHEKEL_A[:m], X.dtype)
    c = _table(SHEKEL_C[:m], X.dtype)
    z = np.zeros(X.shape[0], dtype=X.dtype)
    for j in range(m):
        z = z + 1 / (_rowsum((X - a[j]) ** 2) + c[j])
    return z


def _f21(X, noise):
    return _shekel(X, 5)


def _f22(X, noise):
    return _shekel(X, 7)


def _f23(X, noise):
    return _shekel(X, 10)


# ----------------------------------------------------------------------------
# Registry
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Benchmark:
    """One suite function with its decision space and reference optimum.

    ``f_max`` is the nominal known maximum, often rounded; ``x_opt`` is a
    point at (or within rounding of) the true maximum.
    """

    id: str
    name: str
    nd: int
    lower: tuple
    upper: tuple
    f_max: float
    x_opt: tuple
    func: Callable = field(repr=False, compare=False)
    stochastic: bool = False
    nt: int = 1000
    max_probes_per_axis: int = 6

    @property
    def bounds(self) -> tuple:
        return tuple(zip(self.lower, self.upper))

    def evaluate_batch(self, X, noise: Optional[NoiseSource] = None) -> np.ndarray:
        X = np.asarray(X)
        if X.dtype not in (np.float64, np.longdouble):
            X = X.astype(np.float64)
        if X.ndim != 2 or X.shape[1] != self.nd:
            raise ValueError(f"{self.id} expects points with {self.nd} coordinates, got shape {X.shape}")
        return self.func(X, noise)

    def evaluate(self, x, noise: Optional[NoiseSource] = None):
        x = np.asarray(x)
        if x.ndim != 1:
            raise ValueError(f"{self.id} expects a single point, got shape {x.shape}")
        return self.evaluate_batch(x[None, :], noise)[0]


def _cube(nd, lo, hi):
    return (lo,) * nd, (hi,) * nd


def _make_suite() -> dict:
    spec = [
        # id, name, nd, (lower, upper), f_max, x_opt, func
        ("F1", "sphere", 30, _cube(30, -100.0, 100.0), 0.0, (0.0,) * 30, _f1),
        ("F2", "Schwefel 2.22", 30, _cube(30, -10.0, 10.0), 0.0, (0.0,) * 30, _f2),
        ("F3", "Schwefel 1.2", 30, _cube(30, -100.0, 100.0), 0.0, (0.0,) * 30, _f3),
        ("F4", "Schwefel 2.21", 30, _cube(30, -100.0, 100.0), 0.0, (0.0,) * 30, _f4),
        ("F5", "Rosenbrock (source form)", 30, _cube(30, -30.0, 30.0), 0.0, (1.0,) * 30, _f5),
        ("F6", "step", 30, _cube(30, -100.0, 100.0), 0.0, (0.0,) * 30, _f6),
        ("F7", "quartic with noise", 30, _cube(30, -1.28, 1.28), 0.0, (0.0,) * 30, _f7),
        ("F8", "Schwefel 2.26", 30, _cube(30, -500.0, 500.0), 12569.5, (420.9687463,) * 30, _f8),
        ("F9", "Rastrigin (source form)", 30, _cube(30, -5.12, 5.12), 0.0, (0.0,) * 30, _f9),
        ("F10", "Ackley", 30, _cube(30, -32.0, 32.0), 0.0, (0.0,) * 30, _f10),
        ("F11", "Griewank shifted", 30, _cube(30, -600.0, 600.0), 0.0, (100.0,) * 30, _f11),
        ("F12", "penalized 1", 30, _cube(30, -50.0, 50.0), 0.0, (-1.0,) * 30, _f12),
        ("F13", "penalized 2", 30, _cube(30, -50.0, 50.0), 0.0, (1.0,) * 30, _f13),
        ("F14", "Shekel foxholes", 2, _cube(2, -65.536, 65.536), -1.0, (-31.97833, -31.97833), _f14),
        ("F15", "Kowalik", 4, _cube(4, -5.0, 5.0), -0.0003075, (0.192833, 0.190836, 0.123117, 0.135766), _f15),
        ("F16", "six-hump camel back", 2, _cube(2, -5.0, 5.0), 1.0316285, (0.08984201, -0.71265640), _f16),
        ("F17", "Branin", 2, ((-5.0, 0.0), (10.0, 15.0)), -0.398, (np.pi, 2.275), _f17),
        ("F18", "Goldstein-Price", 2, _cube(2, -2.0, 2.0), -3.0, (0.0, -1.0), _f18),
        ("F19", "Hartman 3", 3, _cube(3, 0.0, 1.0), 3.86, (0.114614, 0.555649, 0.852547), _f19),
        (
            "F20",
            "Hartman 6",
            6,
            _cube(6, 0.0, 1.0),
            3.32,
            (0.2017076, 0.1467809, 0.4767449, 0.2753424, 0.3116519, 0.6572752),
            _f20,
        ),
        ("F21", "Shekel m=5", 4, _cube(4, 0.0, 10.0), 10.0, (4.00004, 4.00013, 4.00004, 4.00013), _f21),
        ("F22", "Shekel m=7", 4, _cube(4, 0.0, 10.0), 10.0, (4.00057, 4.00069, 3.99949, 3.99961), _f22),
        ("F23", "Shekel m=10", 4, _cube(4, 0.0, 10.0), 10.0, (4.00075, 4.00059, 3.99966, 3.99951), _f23),
    ]
    suite = {}
    for fid, name, nd, (lo, hi), f_max, x_opt, func in spec:
        number = int(fid[1:])
        suite[fid] = Benchmark(
            id=fid,
            name=name,
            nd=nd,
            lower=lo,
            upper=hi,
            f_max=f_max,
            x_opt=x_opt,
            func=func,
            stochastic=fid == "F7",
            nt=100 if fid == "F7" else 1000,
            max_probes_per_axis=6 if number <= 13 else 14,
        )
    return suite


SUITE = _make_suite()
FUNCTION_IDS = tuple(SUITE)


def get_benchmark(function_id) -> Benchmark:
    if isinstance(function_id, Benchmark):
        return function_id
    key = str(function_id).strip().upper()
    if key not in SUITE:
        raise UnknownFunctionError(f"unknown function id {function_id!r}; expected one of F1..F23")
    return SUITE[key]


def evaluate(benchmark, x: Sequence[float], noise_source: Optional[NoiseSource] = None):
    """Fitness of ``benchmark`` at the single point ``x`` (maximization form)."""
    return get_benchmark(benchmark).evaluate(x, noise_source)


def known_optimum(benchmark):
    """``(f_max, nd, bounds)`` for reporting and registry use."""
    b = get_benchmark(benchmark)
    return b.f_max, b.nd, b.bounds


def registry_manifest() -> list:
    rows = []
    for b in SUITE.values():
        rows.append(
            {
                "id": b.id,
                "name": b.name,
                "nd": b.nd,
                "lower": list(b.lower) if len(set(b.lower)) > 1 else b.lower[0],
                "upper": list(b.upper) if len(set(b.upper)) > 1 else b.upper[0],
                "bounds": [list(pair) for pair in b.bounds],
                "f_max": b.f_max,
                "nt": b.nt,
                "stochastic": b.stochastic,
            }
        )
    return rows
