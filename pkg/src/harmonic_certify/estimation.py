"""Frequency estimation via the shift-invariance subspace method (ESPRIT).

The estimator builds the Hankel matrix of consecutive samples, takes the
dominant left singular subspace U of the model order, solves the
shift-invariance least-squares problem U[:-1] Psi = U[1:], and reads the
frequencies off the eigenvalue arguments of Psi.  Coefficients are then
recovered by least squares on the sampling grid.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import IllConditionedWarning, RankDeficient
from .torus import ExponentialSum, SampleGrid

#: Relative singular-value floor below which the Hankel matrix is treated as
#: rank deficient for the requested model order.
RANK_RTOL = 1e-12

#: Coefficients with modulus below this are dropped from estimates.
COEFF_FLOOR = 1e-14

#: Least-squares Gram condition number above which a warning is emitted.
COND_LIMIT = 1e12


@dataclass(frozen=True)
class EstimationResult:
    """Estimated frequencies/coefficients and the grid-fit residual norm."""

    frequencies: tuple
    coefficients: tuple
    residual_norm: float

    def to_exponential_sum(self) -> ExponentialSum:
        return ExponentialSum(self.frequencies, self.coefficients)


def default_window(n_samples: int) -> int:
    """Square-ish Hankel window floor((L+1)/2)."""
    return (n_samples + 1) // 2


def esprit(samples, model_order: int, window: int | None = None) -> np.ndarray:
    """Estimate `model_order` frequencies from consecutive samples.

    Returns frequencies in [0, 1), sorted ascending.  Requires
    model_order <= window <= L - model_order + 1 so the Hankel matrix can
    carry rank model_order; raises RankDeficient when its numerical rank
    falls short of the requested order.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    n = samples.size
    if window is None:
        window = default_window(n)
    if not 1 <= model_order <= window or window > n - model_order + 1:
        raise ValueError(
            f"need model_order <= window <= L - model_order + 1, got "
            f"order {model_order}, window {window}, L = {n}")
    rows = n - window + 1
    idx = np.arange(rows)[:, None] + np.arange(window)[None, :]
    hankel = samples[idx]
    u, s, _ = np.linalg.svd(hankel, full_matrices=False)
    if s[model_order - 1] < RANK_RTOL * s[0]:
        raise RankDeficient(
            f"singular value {model_order} of the Hankel matrix is below "
            f"{RANK_RTOL} * sigma_1; lower the model order")
    subspace = u[:, :model_order]
    shift, *_ = np.linalg.lstsq(subspace[:-1], subspace[1:], rcond=None)
    eigenvalues = np.linalg.eigvals(shift)
    freqs = (np.angle(eigenvalues) / (2.0 * np.pi)) % 1.0
    freqs[freqs >= 1.0] = 0.0
    return np.sort(freqs)


def least_squares_coefficients(samples, grid: SampleGrid, frequencies) -> np.ndarray:
    """Coefficients minimizing ||V c - samples||_2 on the grid.

    Emits IllConditionedWarning (and still returns the minimizer) when the
    Gram condition number of the design matrix exceeds 1e12.
    """
    samples = np.asarray(samples, dtype=complex).ravel()
    freqs = np.asarray(frequencies, dtype=float).ravel()
    if freqs.size > grid.size:
        raise ValueError("more frequencies than grid points")
    if np.unique(freqs).size != freqs.size:
        raise ValueError("frequencies must be distinct")
    design = np.exp(2j * np.pi * np.outer(grid.points(), freqs))
    gram_cond = np.linalg.cond(design.conj().T @ design)
    if gram_cond > COND_LIMIT:
        warnings.warn(
            f"design Gram condition {gram_cond:.3e} exceeds {COND_LIMIT:.0e}",
            IllConditionedWarning, stacklevel=2)
    coeffs, *_ = np.linalg.lstsq(design, samples, rcond=None)
    return coeffs


def estimate(samples, grid: SampleGrid, model_order: int,
             window: int | None = None) -> EstimationResult:
    """ESPRIT then least squares; terms with negligible coefficients dropped."""
    samples = np.asarray(samples, dtype=complex).ravel()
    if samples.size != grid.size:
        raise ValueError("sample count must match the grid size")
    freqs = esprit(samples, model_order, window)
    coeffs = least_squares_coefficients(samples, grid, freqs)
    keep = np.abs(coeffs) >= COEFF_FLOOR
    freqs, coeffs = freqs[keep], coeffs[keep]
    design = np.exp(2j * np.pi * np.outer(grid.points(), freqs))
    residual = float(np.linalg.norm(design @ coeffs - samples))
    return EstimationResult(tuple(freqs.tolist()), tuple(coeffs.tolist()), residual)
