"""Vandermonde matrices, polynomial least squares, and the differentiation matrix.

Column convention (used by the whole package): ascending degree. Column k of
``build_vandermonde(x, K)`` holds ``x**k``, so column 0 is all ones and a
coefficient vector ``w = [w_0, ..., w_{K-1}]`` represents the polynomial
``w_0 + w_1*x + ... + w_{K-1}*x**(K-1)``. Note that the descending convention
is also common elsewhere (e.g. ``numpy.polyfit``); everything here is ascending.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError


def as_locations(x) -> np.ndarray:
    """Validate and return sampling locations as a 1-D float64 vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise InvalidInputError(f"sample locations must be 1-D, got shape {x.shape}")
    if x.size == 0:
        raise InvalidInputError("sample locations must contain at least one entry")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("sample locations must be finite")
    return x


def build_vandermonde(x, num_coeffs: int) -> np.ndarray:
    """Vandermonde matrix with entry (n, k) = x[n]**k, k = 0..num_coeffs-1.

    Columns are generated by the multiplicative recurrence
    ``col_k = col_{k-1} * x`` (never a generic power call), so column k is
    bitwise the element-wise product of column k-1 with x.
    """
    x = as_locations(x)
    if num_coeffs < 1:
        raise InvalidInputError(f"num_coeffs must be >= 1, got {num_coeffs}")
    # np.vander builds columns via multiply.accumulate, which is exactly the
    # column recurrence above.
    return np.vander(x, num_coeffs, increasing=True)


def ols_fit(V: np.ndarray, y) -> np.ndarray:
    """Least-squares coefficients minimizing ||y - V @ w||_2.

    Solved through an orthogonal (SVD) decomposition rather than the normal
    equations, which would square the condition number of V.

    Raises
    ------
    RankDeficiencyError
        If V is numerically rank deficient (duplicate locations or fewer rows
        than columns). The detected numerical rank is attached; the cutoff is
        ``max(N, K) * sigma_max * eps``.
    """
    V = np.asarray(V, dtype=float)
    y = np.asarray(y, dtype=float)
    num_coeffs = V.shape[1]
    # rcond=None selects the max(N, K) * sigma_max * eps cutoff.
    w, _, rank, _ = np.linalg.lstsq(V, y, rcond=None)
    if rank < num_coeffs:
        raise RankDeficiencyError(
            f"Vandermonde matrix has numerical rank {rank} < {num_coeffs}; "
            "locations must be pairwise distinct with at least as many rows as columns",
            rank=int(rank),
        )
    return w


def synthesize_observations(x, coeffs: np.ndarray) -> np.ndarray:
    """Noiseless observations V(x) @ coeffs for a K x L coefficient matrix.

    Column l of the result samples the polynomial with coefficient column l
    at every location in x.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 2:
        raise InvalidInputError(f"coefficient matrix must be 2-D, got shape {coeffs.shape}")
    if not np.all(np.isfinite(coeffs)):
        raise InvalidInputError("coefficient matrix must be finite")
    return build_vandermonde(x, coeffs.shape[0]) @ coeffs


def differentiation_matrix(num_coeffs: int) -> np.ndarray:
    """K x K matrix mapping ascending coefficients to their derivative's.

    Superdiagonal holds (1, 2, ..., K-1); every other entry is zero. For
    K = 1 this is the 1 x 1 zero matrix.
    """
    if num_coeffs < 1:
        raise InvalidInputError(f"num_coeffs must be >= 1, got {num_coeffs}")
    return np.diag(np.arange(1.0, num_coeffs), k=1)


def condition_estimate(V: np.ndarray) -> float:
    """Spectral condition number sigma_max / sigma_min of V.

    Returns ``inf`` for a singular matrix. Intended for diagnostics and
    warnings only; no routine in this package aborts on ill conditioning.
    """
    sv = np.linalg.svd(np.asarray(V, dtype=float), compute_uv=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])
