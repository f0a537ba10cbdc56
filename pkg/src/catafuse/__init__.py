"""Horn clause transformation that fuses fold-based queries into predicates.

Public surface: parse_problem, ConstraintEngine, transform_problem,
transformed_problem, emit_smtlib, solve, check_equisat, run_bench.
"""

from .engine import ConstraintEngine
from .parser import parse_problem
from .smtlib import emit_smtlib
from .solver import SolverConfig, check_equisat, run_bench, solve
from .transform import transform_problem, transformed_problem

__version__ = "0.1.0"

__all__ = [
    "ConstraintEngine", "SolverConfig", "check_equisat", "emit_smtlib",
    "parse_problem", "run_bench", "solve", "transform_problem",
    "transformed_problem", "__version__",
]
