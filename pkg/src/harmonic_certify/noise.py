"""Complex Gaussian noise, the norm-estimator tail bound, and a posteriori
certificates.

The noise model draws eta_k = X_{k,1} + i X_{k,2} with independent
N(0, sigma^2) components from a counter-based deterministic stream, so any
trial of a sweep is reproducible independently of execution order.

For v in C^K observed as v + eta, with probability at least

    1 - exp(-K^{(1+delta)/2}) - 2 exp(-K^delta / 8)

the norm estimator |‖v+eta‖^2 - 2K sigma^2|^{1/2} + (2+sqrt 2) sigma
K^{(1+delta)/4} dominates ‖v‖.  Applied to the residual between noisy
samples and a candidate sum, this upgrades the well-posedness certificate to
an a posteriori bound computable from observed data alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bounds
from .bounds import Verdict
from .exceptions import ModelViolation, UnmatchedFrequencies
from .torus import (ExponentialSum, SampleGrid, match_partition, sample,
                    separation)


def noise_stream(seed: int, key: tuple = ()) -> np.random.Generator:
    """Counter-based generator for stream `key` of the experiment `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class NoiseModel:
    """Per-component standard deviation and the experiment seed."""

    sigma: float
    seed: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


def sample_noise(model: NoiseModel, count: int, key: tuple = ()) -> np.ndarray:
    """`count` draws X1 + i X2 with independent N(0, sigma^2) components."""
    rng = noise_stream(model.seed, key)
    return (rng.normal(scale=model.sigma, size=count)
            + 1j * rng.normal(scale=model.sigma, size=count))


def gauss_norm_estimator(noisy_residual_norm_sq: float, K: int,
                         sigma: float, delta: float) -> float:
    """|r^2 - 2K sigma^2|^{1/2} + (2 + sqrt 2) sigma K^{(1+delta)/4}."""
    if noisy_residual_norm_sq < 0:
        raise ValueError("squared residual norm must be nonnegative")
    centered = abs(noisy_residual_norm_sq - 2.0 * K * sigma**2)
    return math.sqrt(centered) + (2.0 + math.sqrt(2.0)) * sigma * K ** ((1.0 + delta) / 4.0)


def success_probability(K: int, delta: float) -> float:
    """1 - exp(-K^{(1+delta)/2}) - 2 exp(-K^delta / 8); may be <= 0.

    A nonpositive value means the tail bound is vacuous for this K and
    delta; the raw value is returned so callers can flag it.
    """
    return 1.0 - math.exp(-K ** ((1.0 + delta) / 2.0)) - 2.0 * math.exp(-(K**delta) / 8.0)


@dataclass(frozen=True)
class APosterioriCertificate:
    """Observable error certificate for an estimated sum.

    `estimator` bounds the noiseless sampling distance with probability
    `success_probability`; the verdict is CERTIFIED when estimator^2 stays
    below the well-posedness threshold (4N+4)/3 * c_min^2, in which case the
    weighted frequency-coefficient error of the (then guaranteed) matching
    is at most estimator^2.  `weighted_error` and `estimate_holds` are only
    present in experiment mode, where the ground truth is known.
    """

    estimator: float
    weighted_error: Optional[float]
    premise_value: float
    premise_threshold: float
    success_probability: float
    probability_vacuous: bool
    delta: float
    verdict: Verdict
    c_min: float
    c_min_source: str
    estimate_holds: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "estimator": self.estimator,
            "weighted_error": self.weighted_error,
            "premise_value": self.premise_value,
            "premise_threshold": self.premise_threshold,
            "success_probability": self.success_probability,
            "probability_vacuous": self.probability_vacuous,
            "delta": self.delta,
            "verdict": self.verdict.value,
            "c_min": self.c_min,
            "c_min_source": self.c_min_source,
            "estimate_holds": self.estimate_holds,
        }


def apost_certificate(noisy_samples, g: ExponentialSum, n: int, sigma: float,
                      delta: float, q: float,
                      truth: Optional[ExponentialSum] = None) -> APosterioriCertificate:
    """Certificate for an estimate g against noisy samples on [-n, n].

    Certificate mode (truth omitted) uses g's smallest coefficient modulus
    as c_min, the only observable choice.  Experiment mode additionally
    matches g against the known truth at threshold 3/(2n+2), computes the
    weighted error, and records whether it is dominated by estimator^2;
    c_min is then the minimum over both sums.  If the matching fails even
    though the premise certified, UnmatchedFrequencies propagates -- that is
    a tail event whose frequency is bounded by 1 - success_probability.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    t = 3.0 / (2 * n + 2)
    if q < t:
        raise ModelViolation(f"q = {q} is below 3/(2n+2) = {t}")
    if not bounds.meets_separation(separation(g.frequencies), 2 * q):
        raise ModelViolation("estimate separation is below 2q")
    if truth is not None and not bounds.meets_separation(
            separation(truth.frequencies), 2 * q):
        raise ModelViolation("ground-truth separation is below 2q")
    grid = SampleGrid(-n, n)
    noisy = np.asarray(noisy_samples, dtype=complex).ravel()
    if noisy.size != grid.size:
        raise ValueError(f"expected {grid.size} samples on [-{n}, {n}]")
    K = grid.size
    residual_sq = float(np.sum(np.abs(noisy - sample(g, grid)) ** 2))
    estimator = gauss_norm_estimator(residual_sq, K, sigma, delta)
    if truth is None:
        c_min, source = g.min_coefficient_modulus, "estimate"
    else:
        c_min = min(g.min_coefficient_modulus, truth.min_coefficient_modulus)
        source = "both"
    premise_value = estimator**2
    premise_threshold = (4.0 * n + 4.0) / 3.0 * c_min**2
    certified = premise_value <= premise_threshold
    prob = success_probability(K, delta)
    weighted = None
    holds = None
    if truth is not None:
        try:
            matching = match_partition(truth.frequencies, g.frequencies, t)
            if matching.unmatched:
                raise UnmatchedFrequencies(
                    f"{len(matching.unmatched)} frequencies without partner")
            weighted = bounds.weighted_frequency_error(
                matching, truth.terms(), g.terms(), n)
            holds = weighted <= premise_value
        except UnmatchedFrequencies:
            if certified:
                raise
    return APosterioriCertificate(
        estimator=estimator, weighted_error=weighted,
        premise_value=premise_value, premise_threshold=premise_threshold,
        success_probability=prob, probability_vacuous=prob <= 0.0,
        delta=delta, verdict=Verdict.CERTIFIED if certified else Verdict.PREMISE_FAILED,
        c_min=c_min, c_min_source=source, estimate_holds=holds)
