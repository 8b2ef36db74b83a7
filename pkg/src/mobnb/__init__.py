"""Multi-objective branch-and-bound over NSGA-II for mixed-integer nonlinear programs."""

from mobnb.core import (
    ObjectiveVector,
    ParetoArchive,
    Solution,
    VariableVector,
    archive_merge,
    constrained_dominates,
    dominates,
    ideal_point,
    pareto_filter,
)
from mobnb.problems import ProblemSpec, VariableDomain, get_problem, registry

__version__ = "0.1.0"

__all__ = [
    "ObjectiveVector",
    "ParetoArchive",
    "ProblemSpec",
    "Solution",
    "VariableDomain",
    "VariableVector",
    "archive_merge",
    "constrained_dominates",
    "dominates",
    "get_problem",
    "ideal_point",
    "pareto_filter",
    "registry",
]
