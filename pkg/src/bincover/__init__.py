"""Generalized bin covering: exact model, approximation algorithms, oracles."""

__version__ = "0.1.0"

from .core import (Assignment, BinType, Instance, ProblemClass, RatioReport,
                   Refusal, Supply, UsageError, ValidationError, profit, validate)

__all__ = [
    "Assignment", "BinType", "Instance", "ProblemClass", "RatioReport",
    "Refusal", "Supply", "UsageError", "ValidationError", "profit", "validate",
    "__version__",
]
