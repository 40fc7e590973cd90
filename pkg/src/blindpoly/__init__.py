"""Blind polynomial regression.

Recovers both the sampling locations x and the coefficient matrix W from
observations Y = V(x) W, where V is a Vandermonde matrix: either by
exhaustively selecting the best N-subset of a candidate grid, or by fitting
the Vandermonde column space to the observation subspace with a sequential
convex programming loop. Locations are identifiable only up to an affine
(generalized-Pascal) reparameterization; estimates are scored with the
Pascal-normalized error (PNE).
"""

from .ambiguity import (
    PascalTransform,
    PneResult,
    apply_transform,
    compose,
    pascal_matrix,
    pne,
    verify_pascal_identity,
)
from .errors import (
    DegenerateEstimateError,
    InvalidInputError,
    RankDeficiencyError,
    SearchBudgetError,
)
from .jitter import (
    JitterInstance,
    JitterScenario,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    overlap_possible,
)
from .selection import SelectionResult, exhaustive_search, selection_residual
from .subspace import (
    ScpConfig,
    SignalSubspace,
    SolverReport,
    alternating_minimization,
    signal_subspace,
    solve_subspace,
)
from .vandermonde import (
    build_vandermonde,
    condition_estimate,
    differentiation_matrix,
    ols_fit,
    synthesize_observations,
)

__all__ = [
    "PascalTransform",
    "PneResult",
    "apply_transform",
    "compose",
    "pascal_matrix",
    "pne",
    "verify_pascal_identity",
    "DegenerateEstimateError",
    "InvalidInputError",
    "RankDeficiencyError",
    "SearchBudgetError",
    "JitterInstance",
    "JitterScenario",
    "generate_instance",
    "instance_from_dict",
    "instance_to_dict",
    "overlap_possible",
    "SelectionResult",
    "exhaustive_search",
    "selection_residual",
    "ScpConfig",
    "SignalSubspace",
    "SolverReport",
    "alternating_minimization",
    "signal_subspace",
    "solve_subspace",
    "build_vandermonde",
    "condition_estimate",
    "differentiation_matrix",
    "ols_fit",
    "synthesize_observations",
]

__version__ = "0.1.0"
