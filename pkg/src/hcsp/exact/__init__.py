from .augmecon import AugmeconResult, GridConfig, GridStep, InfeasibleProblem, augmecon2, lexicographic_solve
from .backends import BackendError, ExternalBackend, MilpBackend, Point, active_days
from .enumerate import EnumerationBackend, EnumerationTooLarge, brute_force_front, enumerate_table
from .lpformat import lp_text, read_solution, write_lp
from .milp import MilpModel, build_milp, decode, variable_count

__all__ = [
    "AugmeconResult", "GridConfig", "GridStep", "InfeasibleProblem", "augmecon2", "lexicographic_solve",
    "BackendError", "ExternalBackend", "MilpBackend", "Point", "active_days",
    "EnumerationBackend", "EnumerationTooLarge", "brute_force_front", "enumerate_table",
    "lp_text", "read_solution", "write_lp",
    "MilpModel", "build_milp", "decode", "variable_count",
]
