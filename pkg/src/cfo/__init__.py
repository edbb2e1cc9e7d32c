"""Central Force Optimization with the 23-function benchmark suite."""

__version__ = "0.1.0"

from .benchmarks import SUITE, FUNCTION_IDS, Benchmark, evaluate, get_benchmark, known_optimum, penalty_u
from .engine import CfoParams, DecisionSpace, RunRecord, RunState, run_single
from .errors import CfoError, ConfigurationError, UnknownFunctionError
from .sweep import REFERENCE_PROFILE, SweepConfig, SweepResult, run_sweep, table1_row

__all__ = [
    "__version__",
    "SUITE",
    "FUNCTION_IDS",
    "Benchmark",
    "evaluate",
    "get_benchmark",
    "known_optimum",
    "penalty_u",
    "CfoParams",
    "DecisionSpace",
    "RunRecord",
    "RunState",
    "run_single",
    "CfoError",
    "ConfigurationError",
    "UnknownFunctionError",
    "SweepConfig",
    "SweepResult",
    "run_sweep",
    "REFERENCE_PROFILE",
    "table1_row",
]
