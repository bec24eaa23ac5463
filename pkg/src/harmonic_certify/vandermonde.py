"""Vandermonde matrices with unimodular nodes and their smallest singular value.

The matrix for frequencies y_1..y_M has entries e^{2 pi i k y_j} with row
exponents k = 0..N-1 (one less than the sampling convention of the energy
bounds: grid [0, N-1] corresponds to the separated-columns bound N+1-1/q).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bounds
from .exceptions import (ConvergenceFailure, DuplicateFrequency,
                         PreconditionViolated)
from .torus import separation, wrap_distance, wrap_frequency


@dataclass(frozen=True)
class VandermondeSpec:
    """Frequencies (ordered, distinct torus points) and row count."""

    frequencies: tuple
    rows: int

    def __post_init__(self):
        freqs = tuple(wrap_frequency(v) for v in self.frequencies)
        object.__setattr__(self, "frequencies", freqs)
        if len(set(freqs)) != len(freqs):
            raise DuplicateFrequency("frequencies must be distinct torus points")
        if not freqs:
            raise ValueError("at least one frequency is required")
        if self.rows < 1:
            raise ValueError("rows must be a positive integer")


def build(spec: VandermondeSpec) -> np.ndarray:
    """Dense N x M matrix with entries e^{2 pi i k y_j}, k = 0..N-1."""
    k = np.arange(spec.rows)
    return np.exp(2j * np.pi * np.outer(k, np.asarray(spec.frequencies)))


def sigma_min(matrix: np.ndarray) -> float:
    """Smallest singular value via the Gram matrix of the short dimension.

    The eigen-decomposition runs on the M x M (or N x N) Hermitian Gram
    matrix, which is cheap for the tall skinny matrices used here; a dense
    SVD is the fallback if it does not converge.  Accuracy is limited by the
    squared condition number, which stays within double precision at desk
    scales (N <= 512, M <= 64).
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("need a nonempty 2-d matrix")
    gram = a.conj().T @ a if a.shape[0] >= a.shape[1] else a @ a.conj().T
    try:
        eigenvalues = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError:
        try:
            return float(np.linalg.svd(a, compute_uv=False)[-1])
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ConvergenceFailure("Gram and dense SVD both failed") from exc
    return float(np.sqrt(max(eigenvalues[0], 0.0)))


class BoundKind(enum.Enum):
    SEPARATED = "separated"
    PAIRS = "pairs"


@dataclass(frozen=True)
class SigmaReport:
    """Exact smallest singular value against a closed-form lower bound.

    `pair_antisymmetry` is a diagnostic for the pairs bound only: the squared
    overlap of the smallest right singular vector with the normalized (1, -1)
    pattern on the closest pair.  No threshold is asserted on it.
    """

    sigma_min: float
    sigma_min_squared: float
    bound: float
    ratio: float
    bound_kind: BoundKind
    tau: Optional[float] = None
    pair_antisymmetry: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.sigma_min_squared >= self.bound - 1e-9 * max(1.0, self.sigma_min_squared)


def _ratio(sigma_sq: float, bound: float) -> float:
    return float("inf") if bound == 0 else sigma_sq / bound


def verify_separated(spec: VandermondeSpec, q: float) -> SigmaReport:
    """Exact sigma_min^2 vs. the bound N+1-1/q for q-separated columns."""
    if not bounds.meets_separation(separation(spec.frequencies), q):
        raise PreconditionViolated(
            f"columns are not q-separated (q = {q})")
    bound = bounds.vandermonde_bound_separated(spec.rows, q)
    s = sigma_min(build(spec))
    return SigmaReport(s, s**2, bound, _ratio(s**2, bound), BoundKind.SEPARATED)


def verify_pairs(spec_y: VandermondeSpec, spec_yp: VandermondeSpec,
                 q: float) -> SigmaReport:
    """Exact sigma_min^2 of the interleaved matrix vs. the pairs bound.

    Both specs must share the row count and be q-separated with
    q >= 3/(N+1), and no frequency may have two partners of the other set
    within q.  tau is the smallest cross distance.
    """
    if spec_y.rows != spec_yp.rows:
        raise PreconditionViolated("both node sets must share the row count")
    n = spec_y.rows
    if q < 3.0 / (n + 1):
        raise PreconditionViolated(f"q = {q} is below 3/(N+1) = {3.0 / (n + 1)}")
    for spec in (spec_y, spec_yp):
        if not bounds.meets_separation(separation(spec.frequencies), q):
            raise PreconditionViolated(f"a node set is not q-separated (q = {q})")
    ya = np.asarray(spec_y.frequencies)
    yb = np.asarray(spec_yp.frequencies)
    dist = wrap_distance(ya[:, None], yb[None, :])
    if np.any(np.sum(dist < q, axis=1) > 1) or np.any(np.sum(dist < q, axis=0) > 1):
        raise PreconditionViolated(
            "some frequency has two partners of the other set within q")
    tau = float(dist.min())
    bound = bounds.vandermonde_bound_pairs(n, q, tau)
    combined = VandermondeSpec(spec_y.frequencies + spec_yp.frequencies, n)
    matrix = build(combined)
    gram = matrix.conj().T @ matrix
    eigenvalues, vectors = np.linalg.eigh(gram)
    s = float(np.sqrt(max(eigenvalues[0], 0.0)))
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    v = vectors[:, 0]
    antisym = float(abs(v[i] - v[len(ya) + j]) ** 2 / 2.0)
    return SigmaReport(s, s**2, bound, _ratio(s**2, bound), BoundKind.PAIRS,
                       tau=tau, pair_antisymmetry=antisym)
