"""Cutting-plane and stochastic cutting-plane solvers for data-driven
mixed-integer optimization, with built-in sparse regression, hinge-loss SVM,
and static stochastic knapsack problem families."""

from .engine import (
    default_master,
    evaluate_incumbent_feasibility,
    run_cutting_planes,
    solve_nlp_subproblem,
)
from .sampling import default_n_schedule, sample_without_replacement
from .types import Cut, EngineConfig, RunReport, SubsetSample, VariableLayout

__version__ = "0.1.0"

__all__ = [
    "default_master",
    "evaluate_incumbent_feasibility",
    "run_cutting_planes",
    "solve_nlp_subproblem",
    "default_n_schedule",
    "sample_without_replacement",
    "Cut",
    "EngineConfig",
    "RunReport",
    "SubsetSample",
    "VariableLayout",
    "__version__",
]
