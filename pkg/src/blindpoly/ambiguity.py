"""The affine ambiguity class of blind polynomial regression.

An invertible affine reparameterization ``x -> shift + scale * x`` maps a
Vandermonde row to another Vandermonde row through an upper generalized
Pascal matrix, so sample locations are only identifiable up to that family.
This module builds the Pascal matrix, applies the affine map, and scores
estimates with the Pascal-normalized error (PNE): the smallest normalized
distance between the truth and any affine transform of the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEstimateError, InvalidInputError
from .vandermonde import as_locations, build_vandermonde


@dataclass(frozen=True)
class PascalTransform:
    """Affine reparameterization x -> shift + scale * x.

    ``scale`` must be nonzero so the transform is invertible; the metric and
    the group composition both rely on invertibility.
    """

    shift: float
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "shift", float(self.shift))
        object.__setattr__(self, "scale", float(self.scale))
        if not np.isfinite(self.shift) or not np.isfinite(self.scale):
            raise InvalidInputError("transform parameters must be finite")
        if self.scale == 0.0:
            raise InvalidInputError("transform scale must be nonzero")


@dataclass(frozen=True)
class PneResult:
    """PNE value together with the optimal affine parameters.

    ``value`` equals ``||x_true - (shift + scale * x_hat)||_2 / (N * period)``
    at the stored optimizers.
    """

    value: float
    shift: float
    scale: float


def pascal_matrix(transform: PascalTransform, num_coeffs: int) -> np.ndarray:
    """Upper generalized Pascal matrix of the affine map.

    Entry (i, j) is the coefficient of x**i in (shift + scale*x)**j, i.e.
    ``C(j, i) * shift**(j-i) * scale**i`` for i <= j and zero below the
    diagonal. Columns are built by the additive Pascal recurrence
    ``col_j = shift * col_{j-1} + scale * raise(col_{j-1})``, which avoids
    factorials entirely (exact binomials well past K = 60).
    """
    if num_coeffs < 1:
        raise InvalidInputError(f"num_coeffs must be >= 1, got {num_coeffs}")
    T = np.zeros((num_coeffs, num_coeffs))
    T[0, 0] = 1.0
    for j in range(1, num_coeffs):
        prev = T[:, j - 1]
        T[:, j] = transform.shift * prev
        T[1:, j] += transform.scale * prev[:-1]
    return T


def apply_transform(transform: PascalTransform, x) -> np.ndarray:
    """Element-wise shift + scale * x."""
    return transform.shift + transform.scale * as_locations(x)


def compose(first: PascalTransform, then: PascalTransform) -> PascalTransform:
    """Transform equivalent to applying ``first`` and then ``then``."""
    return PascalTransform(
        shift=then.shift + then.scale * first.shift,
        scale=then.scale * first.scale,
    )


def verify_pascal_identity(x, transform: PascalTransform, num_coeffs: int) -> float:
    """Max abs residual of V(x) @ T - V(shift + scale*x) over all entries.

    Zero in exact arithmetic for every Pascal matrix T; exposed as a public
    helper so both the tests and downstream users can check the identity.
    """
    x = as_locations(x)
    lhs = build_vandermonde(x, num_coeffs) @ pascal_matrix(transform, num_coeffs)
    rhs = build_vandermonde(apply_transform(transform, x), num_coeffs)
    return float(np.max(np.abs(lhs - rhs)))


def pne(x_estimate, x_true, period: float) -> PneResult:
    """Pascal-normalized error between an estimate and the true locations.

    Solves ``min over (shift, scale) of ||x_true - (shift + scale*x_est)||_2``
    as a two-variable linear least-squares problem (orthogonal decomposition,
    design matrix [1 | x_est]) and normalizes by N * period.

    Raises
    ------
    DegenerateEstimateError
        If the estimate is constant, which leaves the scale unidentifiable.
        This signals solver collapse and must be visible to callers.
    """
    x_estimate = as_locations(x_estimate)
    x_true = as_locations(x_true)
    if x_estimate.shape != x_true.shape:
        raise InvalidInputError(
            f"estimate and truth must have equal length, got {x_estimate.size} and {x_true.size}"
        )
    n = x_true.size
    if n < 2:
        raise InvalidInputError("PNE needs at least two locations")
    if period <= 0.0:
        raise InvalidInputError(f"period must be positive, got {period}")

    design = np.column_stack([np.ones(n), x_estimate])
    params, _, rank, _ = np.linalg.lstsq(design, x_true, rcond=None)
    if rank < 2:
        raise DegenerateEstimateError(
            "estimate is (numerically) constant; affine fit is unidentifiable"
        )
    shift, scale = params
    value = float(np.linalg.norm(x_true - (shift + scale * x_estimate)) / (n * period))
    return PneResult(value=value, shift=float(shift), scale=float(scale))
