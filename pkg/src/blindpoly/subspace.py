"""Subspace-fitting recovery of sample locations.

Given observations Y = V(x) W with unknown x and W, the leading left singular
vectors U of Y span the same column space as V(x). Recovery minimizes
``f(x) = 0.5 * ||P V(x)||_F**2`` where ``P = I - U U^T`` projects onto the
orthogonal complement of that subspace. The minimization runs a sequential
convex programming loop: at each iteration the first-order model of f is
minimized over an l2 trust ball (closed form: a normalized gradient step of
length sqrt(rho)), then a grid line search over convex combinations of the
old and proposed iterates enforces monotone descent.

An alternating-minimization baseline on the raw misfit
``0.5 * ||Y - V(x) W||_F**2`` is included for comparison only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError, RankDeficiencyError
from .vandermonde import (
    as_locations,
    build_vandermonde,
    condition_estimate,
    differentiation_matrix,
)

#: Default geometric trust-radius decay per iteration.
TRUST_DECAY = 0.99
#: Default floor for the trust radius (squared step length).
TRUST_FLOOR = 1e-16
#: Condition number of V(x0) above which a diagnostic warning is emitted.
ILL_CONDITION_WARN = 1e12

TERMINATION_OBJECTIVE = "converged-objective"
TERMINATION_STEP = "converged-step"
TERMINATION_MAX_ITER = "max-iterations"


@dataclass(frozen=True)
class SignalSubspace:
    """Orthonormal basis of the observation column space and its complement projector.

    ``basis`` holds the leading K left singular vectors of Y (N x K,
    orthonormal columns); ``projector`` is the symmetric idempotent
    ``I - basis @ basis.T``.
    """

    basis: np.ndarray
    projector: np.ndarray

    def __post_init__(self):
        self.basis.flags.writeable = False
        self.projector.flags.writeable = False


@dataclass(frozen=True)
class ScpConfig:
    """Knobs for the SCP loop.

    ``period`` sets the length scale of the problem (the nominal sampling
    period in the jitter scenario): the default trust schedule starts at
    radius ``(0.5 * period)**2`` and restarts perturb the initial point by a
    uniform offset of half-width ``restart_scale * period``. Supplying
    ``rho_schedule`` overrides the default schedule entirely; it must return
    a positive radius for every iteration index.

    ``objective_tolerance = None`` resolves to ``1e-16 * ||V(x0)||_F**2`` at
    solve time, a relative-to-scale threshold under which the subspace misfit
    is considered exactly fit.
    """

    period: float = 1.0
    rho_schedule: Callable[[int], float] | None = None
    max_iterations: int = 5000
    objective_tolerance: float | None = None
    step_tolerance: float = 1e-10
    line_search_points: int = 32
    num_restarts: int = 0
    restart_scale: float = 0.5

    def __post_init__(self):
        if self.period <= 0.0:
            raise InvalidInputError(f"period must be positive, got {self.period}")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        if self.objective_tolerance is not None and self.objective_tolerance < 0.0:
            raise InvalidInputError("objective_tolerance must be nonnegative")
        if self.step_tolerance < 0.0:
            raise InvalidInputError("step_tolerance must be nonnegative")
        if self.line_search_points < 2:
            raise InvalidInputError("line_search_points must be >= 2")
        if self.num_restarts < 0 or self.restart_scale < 0.0:
            raise InvalidInputError("num_restarts and restart_scale must be nonnegative")

    def trust_radius(self, iteration: int) -> float:
        if self.rho_schedule is not None:
            rho = float(self.rho_schedule(iteration))
            if rho <= 0.0:
                raise InvalidInputError(f"rho_schedule returned {rho} at iteration {iteration}")
            return rho
        rho0 = (0.5 * self.period) ** 2
        return max(rho0 * TRUST_DECAY**iteration, TRUST_FLOOR)


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one solve: estimates, per-iteration objective values, and
    why the loop stopped."""

    x_hat: np.ndarray
    W_hat: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    termination: str
    restart_index: int = 0

    def __post_init__(self):
        self.x_hat.flags.writeable = False
        self.W_hat.flags.writeable = False
        self.objective_trace.flags.writeable = False

    @property
    def final_objective(self) -> float:
        return float(self.objective_trace[-1])


def signal_subspace(Y: np.ndarray, num_coeffs: int) -> SignalSubspace:
    """Leading-K left singular basis of Y and the complement projector.

    Requires more rows than basis vectors and numerical rank >= K; below that
    the signal subspace is unidentifiable.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidInputError(f"observations must be 2-D, got shape {Y.shape}")
    n, num_channels = Y.shape
    if num_coeffs < 1:
        raise InvalidInputError(f"num_coeffs must be >= 1, got {num_coeffs}")
    if n <= num_coeffs:
        raise InvalidInputError(
            f"need more samples than coefficients (N={n}, K={num_coeffs})"
        )
    U, sv, _ = np.linalg.svd(Y, full_matrices=False)
    cutoff = max(n, num_channels) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
    rank = int(np.count_nonzero(sv > cutoff))
    if rank < num_coeffs:
        raise RankDeficiencyError(
            f"observations have numerical rank {rank} < {num_coeffs}; "
            "the signal subspace is unidentifiable",
            rank=rank,
        )
    basis = U[:, :num_coeffs].copy()
    projector = np.eye(n) - basis @ basis.T
    return SignalSubspace(basis=basis, projector=projector)


def _vandermonde_batch(X: np.ndarray, num_coeffs: int) -> np.ndarray:
    """Stack of Vandermonde matrices for a (B, N) batch of location vectors,
    built with the same column recurrence as build_vandermonde."""
    V = np.empty(X.shape + (num_coeffs,))
    V[..., 0] = 1.0
    if num_coeffs > 1:
        V[..., 1:] = X[..., None]
        np.multiply.accumulate(V[..., 1:], axis=-1, out=V[..., 1:])
    return V


def _objective_batch(projector: np.ndarray, X: np.ndarray, num_coeffs: int) -> np.ndarray:
    """f evaluated at each row of a (B, N) batch of location vectors.

    Single evaluations go through this same code path so that repeated
    evaluations of bit-identical iterates produce bit-identical values
    (the monotone-trace guarantee relies on it).
    """
    V = _vandermonde_batch(X, num_coeffs)
    PV = np.einsum("ij,bjk->bik", projector, V)
    return 0.5 * np.einsum("bjk,bjk->b", PV, PV)


def objective(projector: np.ndarray, x, num_coeffs: int) -> float:
    """Subspace misfit 0.5 * ||P V(x)||_F**2."""
    x = as_locations(x)
    return float(_objective_batch(projector, x[None, :], num_coeffs)[0])


def gradient(projector: np.ndarray, x, num_coeffs: int) -> np.ndarray:
    """Analytic gradient of the subspace misfit.

    Equals ``diag(P^T P V D^T V^T)`` with D the differentiation matrix;
    because P is symmetric idempotent this reduces to
    ``g[n] = <row n of P V, row n of V D>``, which avoids forming any
    N x N product.
    """
    x = as_locations(x)
    V = build_vandermonde(x, num_coeffs)
    VD = V @ differentiation_matrix(num_coeffs)
    PV = projector @ V
    return np.einsum("nk,nk->n", PV, VD)


def scp_step(projector: np.ndarray, x_current, trust_radius: float, num_coeffs: int) -> np.ndarray:
    """Minimizer of the first-order model over the l2 trust ball.

    The linearization is minimized on the ball boundary, giving the closed
    form ``x - sqrt(rho) * g / ||g||``; a vanishing gradient returns the
    current iterate unchanged.
    """
    x_current = as_locations(x_current)
    if trust_radius <= 0.0:
        raise InvalidInputError(f"trust_radius must be positive, got {trust_radius}")
    g = gradient(projector, x_current, num_coeffs)
    g_norm = np.linalg.norm(g)
    if g_norm == 0.0:
        return x_current.copy()
    return x_current - np.sqrt(trust_radius) * (g / g_norm)


#: Number of geometric refinement levels appended near alpha = 1.
_BACKTRACK_LEVELS = 24


def _alpha_grid(points: int) -> np.ndarray:
    """Uniform alpha grid with endpoints, plus a geometric tail toward 1.

    The uniform part is {0, 1/(points+1), ..., points/(points+1), 1}. The
    tail halves the distance to 1 repeatedly so the step length can shrink
    far below the uniform granularity; without it the search would stall on
    the alpha = 1 endpoint whenever the trust radius dwarfs the remaining
    distance to a minimizer.
    """
    uniform = np.linspace(0.0, 1.0, points + 2)
    tail = 1.0 - (1.0 / (points + 1)) * 0.5 ** np.arange(1, _BACKTRACK_LEVELS + 1)
    return np.concatenate([uniform[:-1], tail, [1.0]])


def _line_search(projector, x_current, x_candidate, num_coeffs, points):
    """Shared implementation returning (alpha, x_next, f_next).

    Evaluates f at convex combinations ``alpha * x_current +
    (1 - alpha) * x_candidate`` over the grid of ``_alpha_grid``. The
    alpha = 1 endpoint reproduces x_current exactly, so the minimum can
    never exceed f(x_current).
    """
    alphas = _alpha_grid(points)
    X = alphas[:, None] * x_current[None, :] + (1.0 - alphas[:, None]) * x_candidate[None, :]
    X[-1] = x_current
    X[0] = x_candidate
    f_values = _objective_batch(projector, X, num_coeffs)
    best = int(np.argmin(f_values))
    return float(alphas[best]), X[best], float(f_values[best])


def line_search(projector: np.ndarray, x_current, x_candidate, num_coeffs: int,
                points: int = 32) -> tuple[float, np.ndarray]:
    """Best convex combination of the current and proposed iterates.

    Returns ``(alpha, x_next)`` with ``x_next = alpha * x_current +
    (1 - alpha) * x_candidate`` minimizing f over the evaluated grid;
    ``f(x_next) <= f(x_current)`` is guaranteed by the alpha = 1 endpoint.
    """
    if points < 2:
        raise InvalidInputError(f"points must be >= 2, got {points}")
    x_current = as_locations(x_current)
    x_candidate = as_locations(x_candidate)
    alpha, x_next, _ = _line_search(projector, x_current, x_candidate, num_coeffs, points)
    return alpha, x_next


def _scp_run(projector, x0, num_coeffs, config):
    f_tol = config.objective_tolerance
    if f_tol is None:
        f_tol = 1e-16 * float(np.sum(build_vandermonde(x0, num_coeffs) ** 2))

    x = x0.copy()
    trace = [float(_objective_batch(projector, x[None, :], num_coeffs)[0])]
    termination = TERMINATION_MAX_ITER
    iterations = 0

    if trace[0] <= f_tol:
        termination = TERMINATION_OBJECTIVE
    else:
        for r in range(config.max_iterations):
            rho = config.trust_radius(r)
            x_candidate = scp_step(projector, x, rho, num_coeffs)
            _, x_next, f_next = _line_search(
                projector, x, x_candidate, num_coeffs, config.line_search_points
            )
            step = float(np.linalg.norm(x_next - x))
            x = x_next
            trace.append(f_next)
            iterations = r + 1
            if f_next <= f_tol:
                termination = TERMINATION_OBJECTIVE
                break
            if step < config.step_tolerance:
                termination = TERMINATION_STEP
                break

    return x, np.asarray(trace), iterations, termination


def solve_subspace(Y: np.ndarray, x0, num_coeffs: int, config: ScpConfig | None = None,
                   rng: np.random.Generator | None = None) -> SolverReport:
    """Recover sample locations from Y by SCP on the subspace misfit.

    Runs from ``x0``; if ``config.num_restarts > 0``, additionally runs from
    ``x0`` plus zero-mean uniform perturbations of half-width
    ``restart_scale * period`` and returns the lowest-objective report
    (first restart wins ties). ``W_hat`` is the least-squares coefficient
    matrix for the recovered locations.
    """
    if config is None:
        config = ScpConfig()
    x0 = as_locations(x0)
    Y = np.asarray(Y, dtype=float)
    sub = signal_subspace(Y, num_coeffs)

    cond = condition_estimate(build_vandermonde(x0, num_coeffs))
    if cond > ILL_CONDITION_WARN:
        warnings.warn(
            f"Vandermonde matrix at the starting point has condition {cond:.3e}; "
            "recovered coefficients may be inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )

    if rng is None:
        rng = np.random.default_rng(0)

    best = None
    for restart_index in range(config.num_restarts + 1):
        if restart_index == 0:
            start = x0
        else:
            half_width = config.restart_scale * config.period
            start = x0 + rng.uniform(-half_width, half_width, size=x0.size)
        x_hat, trace, iterations, termination = _scp_run(
            sub.projector, start, num_coeffs, config
        )
        report = SolverReport(
            x_hat=x_hat,
            W_hat=np.linalg.lstsq(build_vandermonde(x_hat, num_coeffs), Y, rcond=None)[0],
            objective_trace=trace,
            iterations=iterations,
            termination=termination,
            restart_index=restart_index,
        )
        if best is None or report.final_objective < best.final_objective:
            best = report
    return best


def data_misfit(Y: np.ndarray, x, coeffs: np.ndarray) -> float:
    """Raw factorization misfit 0.5 * ||Y - V(x) @ coeffs||_F**2."""
    x = as_locations(x)
    R = build_vandermonde(x, coeffs.shape[0]) @ coeffs - np.asarray(Y, dtype=float)
    return 0.5 * float(np.sum(R * R))


def data_misfit_gradient(Y: np.ndarray, x, coeffs: np.ndarray) -> np.ndarray:
    """Gradient of the raw misfit in the locations, coefficients held fixed.

    Entry n is ``<row n of (V(x) @ W - Y), row n of V(x) @ D @ W>``, derived
    the same way as the subspace-misfit gradient.
    """
    x = as_locations(x)
    num_coeffs = coeffs.shape[0]
    V = build_vandermonde(x, num_coeffs)
    R = V @ coeffs - np.asarray(Y, dtype=float)
    VDW = V @ differentiation_matrix(num_coeffs) @ coeffs
    return np.einsum("nl,nl->n", R, VDW)


def alternating_minimization(Y: np.ndarray, x0, num_coeffs: int, max_outer: int = 500,
                             tol: float = 1e-16) -> SolverReport:
    """Alternating baseline on the raw misfit; no global-optimum guarantee.

    Each outer iteration solves coefficients exactly by least squares, then
    takes one trust-region gradient step with line search on the locations.
    ``tol`` is relative to ||Y||_F**2. The objective trace (recorded once per
    outer iteration) is non-increasing; a coefficient update is kept only if
    it does not increase the evaluated misfit, which guards against rounding
    at the convergence plateau.
    """
    x0 = as_locations(x0)
    Y = np.asarray(Y, dtype=float)
    n = x0.size
    if n <= num_coeffs:
        raise InvalidInputError(f"need more samples than coefficients (N={n}, K={num_coeffs})")

    f_tol = tol * float(np.sum(Y * Y))
    spacing = (np.ptp(x0) / (n - 1)) if (n > 1 and np.ptp(x0) > 0) else 1.0

    x = x0.copy()
    coeffs = np.linalg.lstsq(build_vandermonde(x, num_coeffs), Y, rcond=None)[0]
    trace = [data_misfit(Y, x, coeffs)]
    termination = TERMINATION_MAX_ITER
    iterations = 0

    if trace[0] <= f_tol:
        termination = TERMINATION_OBJECTIVE
    else:
        for r in range(max_outer):
            # (a) exact coefficient refresh, kept only if not worse.
            new_coeffs = np.linalg.lstsq(build_vandermonde(x, num_coeffs), Y, rcond=None)[0]
            if data_misfit(Y, x, new_coeffs) <= trace[-1]:
                coeffs = new_coeffs

            # (b) one first-order trust step on the locations.
            g = data_misfit_gradient(Y, x, coeffs)
            g_norm = np.linalg.norm(g)
            rho = max((0.5 * spacing) ** 2 * TRUST_DECAY**r, TRUST_FLOOR)
            if g_norm > 0.0:
                x_candidate = x - np.sqrt(rho) * (g / g_norm)
                alphas = np.linspace(0.0, 1.0, 34)
                best_f, best_x = trace[-1], x
                for a in alphas:
                    x_try = a * x + (1.0 - a) * x_candidate
                    f_try = data_misfit(Y, x_try, coeffs)
                    if f_try < best_f:
                        best_f, best_x = f_try, x_try
                step = float(np.linalg.norm(best_x - x))
                x = best_x
            else:
                step = 0.0

            trace.append(data_misfit(Y, x, coeffs))
            iterations = r + 1
            if trace[-1] <= f_tol:
                termination = TERMINATION_OBJECTIVE
                break
            if step < 1e-12:
                termination = TERMINATION_STEP
                break

    # Final coefficient refresh for the moved locations, same not-worse guard.
    new_coeffs = np.linalg.lstsq(build_vandermonde(x, num_coeffs), Y, rcond=None)[0]
    if data_misfit(Y, x, new_coeffs) <= trace[-1]:
        coeffs = new_coeffs
    return SolverReport(
        x_hat=x,
        W_hat=coeffs,
        objective_trace=np.asarray(trace),
        iterations=iterations,
        termination=termination,
        restart_index=0,
    )
