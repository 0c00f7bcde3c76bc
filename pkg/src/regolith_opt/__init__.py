"""Bucket-wheel asteroid excavation and water-extraction model with a design optimizer."""

from .errors import ConfigError, DesignEvaluationError, DomainError, NonFiniteError, SingularInputError
from .problem import (
    DesignBounds,
    DesignVector,
    MissionRequirements,
    OptimizationProblem,
    SolverConfig,
    SystemEvaluation,
    constraint_residuals,
    cost,
    evaluate_design,
)
from .optimizer import OptimizationResult, fd_gradient, optimize

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DesignBounds",
    "DesignEvaluationError",
    "DesignVector",
    "DomainError",
    "MissionRequirements",
    "NonFiniteError",
    "OptimizationProblem",
    "OptimizationResult",
    "SingularInputError",
    "SolverConfig",
    "SystemEvaluation",
    "constraint_residuals",
    "cost",
    "evaluate_design",
    "fd_gradient",
    "optimize",
]
