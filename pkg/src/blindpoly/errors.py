"""Exception types shared across the package."""

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an input violates a documented precondition (non-finite
    entries, bad shapes, out-of-range sizes)."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """Raised when a matrix is numerically rank deficient for the requested
    operation. Carries the numerical rank that was detected."""

    def __init__(self, message: str, rank: int | None = None):
        super().__init__(message)
        self.rank = rank


class DegenerateEstimateError(ValueError):
    """Raised when a location estimate is constant, which makes the affine
    ambiguity fit unidentifiable. Signals solver collapse to the caller."""


class SearchBudgetError(RuntimeError):
    """Raised when an exhaustive search would exceed its enumeration budget.
    Carries the number of subsets that would have to be tried."""

    def __init__(self, message: str, num_combinations: int):
        super().__init__(message)
        self.num_combinations = num_combinations
