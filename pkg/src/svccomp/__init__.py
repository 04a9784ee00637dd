"""Multi-objective service composition and usage-scheme optimization.

Selects, for each sub-task of a customized production task, a set of
collaborating candidate services and per-service usage counts, minimizing
total completion time, total cost, and the number of selected services.
"""

from importlib import resources

from .domain import (
    Allocation,
    AllocationViolation,
    CandidateService,
    CompositeSolution,
    InfeasibleInstanceError,
    ObjectiveVector,
    Order,
    SubTask,
    TaskSpec,
    support,
    validate_allocation,
    validate_solution,
)
from .evaluation import (
    SubTaskEval,
    completion_times,
    cumulative_usage_time,
    eval_subtask,
    total_objectives,
)
from .experiments import ExperimentConfig, load_config, parse_config
from .nsga2 import run_nsga2
from .oracle import enumerate_allocations, exact_pareto_front
from .pdga import PdgaParams, run as run_pdga
from .solvers import Nsga2Solver, PdgaSolver
from .variation import VariationParams

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AllocationViolation",
    "CandidateService",
    "CompositeSolution",
    "ExperimentConfig",
    "InfeasibleInstanceError",
    "Nsga2Solver",
    "ObjectiveVector",
    "Order",
    "PdgaParams",
    "PdgaSolver",
    "SubTask",
    "SubTaskEval",
    "TaskSpec",
    "VariationParams",
    "clothing_config_path",
    "completion_times",
    "cumulative_usage_time",
    "enumerate_allocations",
    "eval_subtask",
    "exact_pareto_front",
    "load_config",
    "parse_config",
    "run_nsga2",
    "run_pdga",
    "support",
    "total_objectives",
    "validate_allocation",
    "validate_solution",
]


def clothing_config_path():
    """Path to the bundled clothing customization case-study config."""
    return resources.files("svccomp.data").joinpath("clothing.json")
