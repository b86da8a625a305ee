"""Biobjective home care scheduling: cost of paid time versus caregiver-user welfare."""

from .archive import ParetoArchive
from .evaluation import ObjectiveWeights, Route, Solution, check_feasibility, dominates, evaluate
from .instance import Caregiver, Instance, InstanceError, Service, generate_instance, load_instance, save_instance

__all__ = [
    "Caregiver", "Instance", "InstanceError", "ObjectiveWeights", "ParetoArchive", "Route", "Service",
    "Solution", "check_feasibility", "dominates", "evaluate", "generate_instance", "load_instance",
    "save_instance",
]
__version__ = "0.1.0"
