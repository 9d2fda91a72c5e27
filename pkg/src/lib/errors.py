"""Exception types raised by the numerical core.

Non-convergence is deliberately absent: fits and inversions report it through
their result objects instead of raising.
"""

from __future__ import annotations

from typing import Optional


class MaxentError(Exception):
    """Base class for errors raised by the library."""


class RejectedInputError(MaxentError, ValueError):
    """Raised when input data violates a documented precondition.

    `row` and `column` locate the offending entry when known.
    """

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DimensionMismatchError(MaxentError, ValueError):
    """Raised when two objects that must share N (or shape) do not."""


class CapacityError(MaxentError):
    """Raised when an exhaustive computation exceeds its size guard."""


class DegenerateMomentError(MaxentError):
    """Raised when moments are saturated (|q_i| = 1 or |Q_ij| = 1)."""


class ConditioningError(MaxentError):
    """Raised when a covariance matrix cannot be inverted after regularization."""

    def __init__(self, message: str, smallest_eigenvalue: float):
        self.smallest_eigenvalue = smallest_eigenvalue
        super().__init__(f"{message} (smallest eigenvalue {smallest_eigenvalue:.6g})")


class EmptyWindowError(MaxentError):
    """Raised when a window specification yields no window at all."""


class DegenerateGraphError(MaxentError):
    """Raised when a coupling matrix carries no off-diagonal interaction."""


class InsufficientDataError(MaxentError):
    """Raised when a fit has fewer usable points than it needs."""
