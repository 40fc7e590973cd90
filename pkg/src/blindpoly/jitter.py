"""Clock-jitter scenario generation.

A nominally uniform sampling grid on [domain_lo, domain_hi] is perturbed by
i.i.d. truncated-Gaussian jitter: each offset is drawn from a zero-mean
Gaussian with standard deviation ``delta * T / 2`` (T the sampling period)
truncated at one standard deviation, so every displacement is at most
``delta * T / 2`` and adjacent samples can swap order exactly when
``delta >= 1``. Observations are synthesized noiselessly from a random
coefficient matrix with i.i.d. standard-normal entries.

Generation is pure given the scenario seed: the seed is split into
independent sub-streams for the jitter draws and the coefficient draws, so
drawing more of one never perturbs the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .vandermonde import synthesize_observations

_FIXTURE_SCALAR_FIELDS = ("N", "domain_lo", "domain_hi", "delta", "K", "L", "seed")


@dataclass(frozen=True)
class JitterScenario:
    """Parameters of one jitter experiment cell.

    N: number of samples; K: polynomial coefficient count (degree + 1);
    L: number of observation channels (L >= K); delta: jitter severity in
    units of half sampling periods; seed: 64-bit stream seed.
    """

    N: int
    domain_lo: float
    domain_hi: float
    delta: float
    K: int
    L: int
    seed: int

    def __post_init__(self):
        if self.N < 2:
            raise InvalidInputError(f"N must be >= 2, got {self.N}")
        if not self.domain_lo < self.domain_hi:
            raise InvalidInputError(
                f"domain must satisfy lo < hi, got [{self.domain_lo}, {self.domain_hi}]"
            )
        if self.delta < 0.0:
            raise InvalidInputError(f"delta must be nonnegative, got {self.delta}")
        if self.K < 1:
            raise InvalidInputError(f"K must be >= 1, got {self.K}")
        if self.L < self.K:
            raise InvalidInputError(f"need L >= K observation channels, got L={self.L}, K={self.K}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must fit in 64 unsigned bits")

    @property
    def period(self) -> float:
        """Nominal sampling period T = (domain_hi - domain_lo) / (N - 1)."""
        return (self.domain_hi - self.domain_lo) / (self.N - 1)


@dataclass(frozen=True)
class JitterInstance:
    """One generated problem: nominal grid, jittered truth, and observations."""

    scenario: JitterScenario
    uniform_locations: np.ndarray
    true_locations: np.ndarray
    W_true: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        self.uniform_locations.flags.writeable = False
        self.true_locations.flags.writeable = False
        self.W_true.flags.writeable = False
        self.Y.flags.writeable = False


def overlap_possible(scenario: JitterScenario) -> bool:
    """Whether adjacent jittered samples can swap order (delta >= 1)."""
    return scenario.delta >= 1.0


def _truncated_gaussian(rng: np.random.Generator, sigma: float, size: int) -> np.ndarray:
    """Zero-mean Gaussian with std sigma, truncated to [-sigma, sigma].

    Rejection sampling: exact truncated distribution, ~68% acceptance.
    """
    draws = rng.normal(0.0, sigma, size)
    rejected = np.abs(draws) > sigma
    while rejected.any():
        draws[rejected] = rng.normal(0.0, sigma, int(rejected.sum()))
        rejected = np.abs(draws) > sigma
    return draws


def generate_instance(scenario: JitterScenario) -> JitterInstance:
    """Generate the jittered locations, coefficients, and observations.

    Deterministic given the scenario (bit-identical across calls). The jitter
    and coefficient draws come from independently derived sub-streams of the
    scenario seed.
    """
    jitter_seq, coeff_seq = np.random.SeedSequence(scenario.seed).spawn(2)
    sigma = scenario.delta * scenario.period / 2.0

    uniform = np.linspace(scenario.domain_lo, scenario.domain_hi, scenario.N)
    offsets = _truncated_gaussian(np.random.default_rng(jitter_seq), sigma, scenario.N)
    true_locations = uniform + offsets
    W_true = np.random.default_rng(coeff_seq).standard_normal((scenario.K, scenario.L))
    Y = synthesize_observations(true_locations, W_true)
    return JitterInstance(
        scenario=scenario,
        uniform_locations=uniform,
        true_locations=true_locations,
        W_true=W_true,
        Y=Y,
    )


def instance_to_dict(instance: JitterInstance) -> dict:
    """Fixture document: scenario fields plus the generated arrays."""
    scenario = instance.scenario
    return {
        "N": scenario.N,
        "domain_lo": scenario.domain_lo,
        "domain_hi": scenario.domain_hi,
        "delta": scenario.delta,
        "K": scenario.K,
        "L": scenario.L,
        "seed": scenario.seed,
        "uniform_locations": instance.uniform_locations,
        "true_locations": instance.true_locations,
        "W_true": instance.W_true,
        "Y": instance.Y,
    }


def instance_from_dict(doc: dict) -> JitterInstance:
    missing = [key for key in _FIXTURE_SCALAR_FIELDS if key not in doc]
    if missing:
        raise InvalidInputError(f"fixture document is missing fields: {missing}")
    scenario = JitterScenario(
        N=int(doc["N"]),
        domain_lo=float(doc["domain_lo"]),
        domain_hi=float(doc["domain_hi"]),
        delta=float(doc["delta"]),
        K=int(doc["K"]),
        L=int(doc["L"]),
        seed=int(doc["seed"]),
    )
    return JitterInstance(
        scenario=scenario,
        uniform_locations=np.asarray(doc["uniform_locations"], dtype=float),
        true_locations=np.asarray(doc["true_locations"], dtype=float),
        W_true=np.asarray(doc["W_true"], dtype=float),
        Y=np.asarray(doc["Y"], dtype=float),
    )
