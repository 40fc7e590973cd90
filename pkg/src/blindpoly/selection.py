"""Grid-based exhaustive selection of sample locations.

When domain knowledge restricts the locations to a known range, discretize it
into G candidate points and pick the N-subset whose Vandermonde rows best
explain the observations in least squares. The search enumerates all
C(G, N) subsets, so it is only practical for small G and N; the enumeration
budget guards against accidental combinatorial blowups.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError, SearchBudgetError
from .vandermonde import as_locations, build_vandermonde

#: Largest number of subsets exhaustive_search will enumerate by default.
DEFAULT_SEARCH_BUDGET = 10**7


@dataclass(frozen=True)
class SelectionResult:
    """Best grid subset found: indices, squared misfit, and the fitted factors."""

    pattern: np.ndarray
    residual: float
    W_hat: np.ndarray
    x_hat: np.ndarray

    def __post_init__(self):
        self.pattern.flags.writeable = False
        self.W_hat.flags.writeable = False
        self.x_hat.flags.writeable = False


def _check_grid(grid) -> np.ndarray:
    grid = as_locations(grid)
    if grid.size >= 2 and not np.all(np.diff(grid) > 0):
        raise InvalidInputError("candidate grid must be strictly increasing")
    return grid


def _check_pattern(pattern, num_rows: int, grid_size: int) -> np.ndarray:
    pattern = np.asarray(pattern, dtype=int)
    if pattern.ndim != 1 or pattern.size != num_rows:
        raise InvalidInputError(
            f"pattern must select one grid index per observation row ({num_rows})"
        )
    if pattern.size >= 2 and not np.all(np.diff(pattern) > 0):
        raise InvalidInputError("pattern indices must be strictly increasing")
    if pattern[0] < 0 or pattern[-1] >= grid_size:
        raise InvalidInputError(f"pattern indices must lie in [0, {grid_size})")
    return pattern


def _fit_rows(V_rows: np.ndarray, Y: np.ndarray, num_coeffs: int):
    """Least-squares fit on selected Vandermonde rows: (residual, W_hat).

    Every residual comparison in this module flows through this one code
    path, so equal patterns always produce bit-equal residuals.
    """
    W_hat, _, rank, _ = np.linalg.lstsq(V_rows, Y, rcond=None)
    if rank < num_coeffs:
        # Unreachable for distinct grid points with N >= K; defensive only.
        raise RankDeficiencyError(
            f"selected sub-Vandermonde has numerical rank {rank} < {num_coeffs}",
            rank=int(rank),
        )
    misfit = Y - V_rows @ W_hat
    return float(np.sum(misfit * misfit)), W_hat


def selection_residual(grid, pattern, Y: np.ndarray, num_coeffs: int):
    """Squared Frobenius misfit of one selection pattern, with its coefficients.

    Selects rows of the G x K grid Vandermonde matrix (the N x G indicator
    matrix is never materialized), fits coefficients by least squares, and
    returns ``(||Y - V_sel @ W_hat||_F**2, W_hat)``.
    """
    grid = _check_grid(grid)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidInputError(f"observations must be 2-D, got shape {Y.shape}")
    pattern = _check_pattern(pattern, Y.shape[0], grid.size)
    if Y.shape[0] < num_coeffs:
        raise InvalidInputError(
            f"need at least as many rows as coefficients (N={Y.shape[0]}, K={num_coeffs})"
        )
    V_rows = build_vandermonde(grid, num_coeffs)[pattern, :]
    return _fit_rows(V_rows, Y, num_coeffs)


def exhaustive_search(grid, Y: np.ndarray, num_coeffs: int,
                      budget: int = DEFAULT_SEARCH_BUDGET) -> SelectionResult:
    """Best N-subset of the grid by full enumeration.

    Subsets are visited in lexicographic order and the first one attaining
    the minimal residual wins, so ties break lexicographically and the result
    is deterministic.

    Raises
    ------
    SearchBudgetError
        If C(G, N) exceeds ``budget``; the count is attached to the error.
    """
    grid = _check_grid(grid)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidInputError(f"observations must be 2-D, got shape {Y.shape}")
    num_rows = Y.shape[0]
    if num_rows < num_coeffs:
        raise InvalidInputError(
            f"need at least as many rows as coefficients (N={num_rows}, K={num_coeffs})"
        )
    if grid.size < num_rows:
        raise InvalidInputError(
            f"grid must offer at least as many candidates as rows (G={grid.size}, N={num_rows})"
        )
    num_combinations = comb(grid.size, num_rows)
    if num_combinations > budget:
        raise SearchBudgetError(
            f"enumerating C({grid.size}, {num_rows}) = {num_combinations} subsets "
            f"exceeds the budget of {budget}",
            num_combinations=num_combinations,
        )

    V_grid = build_vandermonde(grid, num_coeffs)
    best_residual = np.inf
    best_pattern = None
    best_W = None
    for candidate in combinations(range(grid.size), num_rows):
        residual, W_hat = _fit_rows(V_grid[candidate, :], Y, num_coeffs)
        if residual < best_residual:
            best_residual = residual
            best_pattern = candidate
            best_W = W_hat

    pattern = np.asarray(best_pattern, dtype=int)
    return SelectionResult(
        pattern=pattern,
        residual=best_residual,
        W_hat=best_W,
        x_hat=grid[pattern],
    )
