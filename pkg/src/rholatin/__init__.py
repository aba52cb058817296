"""Completing symmetric rho-latin rectangles to symmetric rho-latin squares."""

from .completion import complete, complete_with_diagonal, construct, construct_with_diagonal, solve
from .conditions import Condition, ConditionVerdict
from .core import (
    EMPTY,
    BudgetError,
    InternalError,
    RhoInstance,
    RhoVector,
    StructuralError,
    SymmetricSquare,
    count_occurrences,
    validate_square,
)

__all__ = [
    "EMPTY",
    "BudgetError",
    "Condition",
    "ConditionVerdict",
    "InternalError",
    "RhoInstance",
    "RhoVector",
    "StructuralError",
    "SymmetricSquare",
    "complete",
    "complete_with_diagonal",
    "construct",
    "construct_with_diagonal",
    "count_occurrences",
    "solve",
    "validate_square",
]
