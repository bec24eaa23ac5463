"""Computable right-hand sides for the sample-energy inequalities.

Three families of lower bounds on sampled energy are provided, each as a
closed-form right-hand side plus a checker that compares it against the
exactly computed left-hand side:

* two-sided constants for well-separated sums over a contiguous grid
  (lower (B-A+2-1/q)*|c|^2, upper (B-A+1/q)*|c|^2);
* the pair/singleton decomposition bound for a sum whose frequencies split
  into matched pairs closer than 3/(n+1) and well-separated leftovers, in
  three variants (modulated / weakened / symmetric, see `Variant`);
* the plain singular-value bounds for Vandermonde matrices derived from the
  two families above.

On top of these sit the conditional well-posedness certificate: if two
separated sums have close samples, they have a total matching with a
weighted frequency-coefficient error controlled by the sampling distance.

The checks are exact inequalities; `REL_TOL` only absorbs floating-point
rounding of both sides.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .exceptions import (ModelViolation, PreconditionViolated,
                         SeparationViolated, ThresholdMismatch,
                         UnmatchedFrequencies)
from .localizing import DilatedLocalizer
from .torus import (ExponentialSum, MatchPartition, SampleGrid, energy,
                    match_partition, sample, sample_at, separation,
                    signed_wrap, wrap_distance)

#: Relative slack tolerated before an inequality is reported as violated.
REL_TOL = 1e-12


def _holds(lhs: float, slack: float) -> bool:
    return slack >= -REL_TOL * max(1.0, lhs)


def meets_separation(value: float, required: float) -> bool:
    """Floating-point-tolerant separation precondition value >= required."""
    return value >= required - REL_TOL * max(1.0, required)


@dataclass(frozen=True)
class BoundReport:
    """One inequality instance: exact left side vs. theorem right side.

    `slack` is the margin of the tightest inequality checked (lhs - rhs for
    one-sided checks); `holds` is slack >= -REL_TOL * max(1, lhs).
    """

    lhs: float
    rhs: float
    slack: float
    constants: dict
    holds: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "holds": self.holds, "constants": dict(self.constants)}


class Variant(enum.Enum):
    """Which form of the pair-decomposition bound to evaluate.

    MODULATED  grid 1..n; the per-pair modulation phases are the arguments
               of the dilated localizer transform at the pair offsets.
    WEAKENED   grid 1..n; coefficient-phase independent weakening.
    SYMMETRIC  grid symmetric about zero (samples k - (n+1)/2); phases zero.
    """

    MODULATED = "modulated"
    WEAKENED = "weakened"
    SYMMETRIC = "symmetric"


def pair_weights(n: int) -> dict:
    """The three weights of the decomposition bound with n samples."""
    return {
        "Y3_weight": 2.0 * (n + 1) / 3.0,
        "pair_sum_weight": (n + 1) / 3.0,
        "pair_diff_weight": np.pi**2 * (n + 1) ** 3 / (2.0 * 3**5),
    }


def wellsep_constants(grid: SampleGrid, q: float) -> tuple:
    """Lower/upper energy constants (B-A+2-1/q, B-A+1/q) for separation q.

    The lower constant may be <= 0, in which case the lower bound is
    vacuous; it is returned unclamped.
    """
    if not q > 0:
        raise ValueError("separation q must be positive")
    span = grid.end - grid.start
    return span + 2.0 - 1.0 / q, span + 1.0 / q


def check_wellsep(f: ExponentialSum, grid: SampleGrid, q: float) -> BoundReport:
    """Check lower*|c|^2 <= sum_k |f(k)|^2 <= upper*|c|^2 over the grid.

    Requires separation(f) >= q.  The report is oriented on the lower bound
    (lhs = energy, rhs = clamped lower bound); `slack` is the smaller of the
    two margins so `holds` reflects both inequalities.  A nonpositive lower
    constant is clamped to zero and flagged vacuous in `constants`.
    """
    if not meets_separation(separation(f.frequencies), q):
        raise SeparationViolated(
            f"separation {separation(f.frequencies)} is below q = {q}")
    lower, upper = wellsep_constants(grid, q)
    norm_sq = f.coefficient_norm_sq
    lhs = energy(f, grid)
    lower_rhs = max(lower, 0.0) * norm_sq
    upper_rhs = upper * norm_sq
    slack = min(lhs - lower_rhs, upper_rhs - lhs)
    constants = {
        "lower": lower, "upper": upper, "coeff_norm_sq": norm_sq,
        "lower_rhs": lower_rhs, "upper_rhs": upper_rhs,
        "vacuous": 1.0 if lower <= 0 else 0.0,
    }
    return BoundReport(lhs, lower_rhs, slack, constants, _holds(lhs, slack))


def _check_admissible(partition: MatchPartition, n: int) -> None:
    """Validate the decomposition hypotheses at threshold 3/(n+1)."""
    t = 3.0 / (n + 1)
    if partition.threshold != t:
        raise ThresholdMismatch(
            f"partition threshold {partition.threshold} != required {t}")
    lefts = [a for a, _ in partition.pairs]
    rights = [b for _, b in partition.pairs]
    unmatched = [v for v, _ in partition.unmatched]
    for name, group in (("matched", lefts), ("partners", rights),
                        ("unmatched", unmatched)):
        arr = np.asarray(group)
        for i in range(len(group)):
            d = wrap_distance(arr[i], arr[i + 1:])
            if np.any(np.asarray(d) < t):
                raise PreconditionViolated(
                    f"two {name} frequencies are closer than {t}")
    for i, (a, _) in enumerate(partition.pairs):
        for j, (_, b) in enumerate(partition.pairs):
            if i != j and wrap_distance(a, b) < t:
                raise PreconditionViolated(
                    f"{a} has a second partner candidate {b} within {t}")
    # unmatched-vs-other-set distances are already MatchPartition invariants;
    # check unmatched against same-set pair members too.
    for v, tag in partition.unmatched:
        own_pairs = lefts if tag == "first" else rights
        for w in own_pairs:
            if wrap_distance(v, w) < t:
                raise PreconditionViolated(
                    f"unmatched {v} is within {t} of matched {w}")


def main_bound_rhs(partition: MatchPartition,
                   first_coefficients: Mapping,
                   second_coefficients: Mapping,
                   n: int,
                   variant: Variant) -> float:
    """Right-hand side of the pair-decomposition bound with n samples.

    Unmatched frequencies contribute (2/3)(n+1)|c|^2.  A pair (y, y') at
    wrap offset u contributes

        (n+1)/3 * |c_y + e^{-i theta} c_{y'}|^2
        + pi^2 (n+1)^3 / (2*3^5) * |u|^2 * |c_y - e^{-i theta} c_{y'}|^2

    where theta is the localizer phase at u for MODULATED, and 0 for
    SYMMETRIC.  WEAKENED replaces the pair terms by the phase-free
    pi^2 (n+1)^3/(2*3^5) * |u|^2 (|c_y|^2 + |c_{y'}|^2).

    The partition must have been built at threshold 3/(n+1)
    (ThresholdMismatch otherwise) and satisfy the decomposition hypotheses
    (PreconditionViolated otherwise).
    """
    variant = Variant(variant)
    _check_admissible(partition, n)
    w = pair_weights(n)
    total = w["Y3_weight"] * sum(
        abs((first_coefficients if tag == "first" else second_coefficients)[v]) ** 2
        for v, tag in partition.unmatched)
    loc = DilatedLocalizer(n) if variant is Variant.MODULATED else None
    for a, b in partition.pairs:
        ca = complex(first_coefficients[a])
        cb = complex(second_coefficients[b])
        u = signed_wrap(b - a)
        if variant is Variant.WEAKENED:
            total += w["pair_diff_weight"] * u**2 * (abs(ca) ** 2 + abs(cb) ** 2)
            continue
        theta = loc.phase(u) if variant is Variant.MODULATED else 0.0
        rotated = np.exp(-1j * theta) * cb
        total += (w["pair_sum_weight"] * abs(ca + rotated) ** 2
                  + w["pair_diff_weight"] * u**2 * abs(ca - rotated) ** 2)
    return float(total)


def symmetric_offsets(n: int) -> np.ndarray:
    """The n sampling offsets k - (n+1)/2, k = 1..n (integers iff n odd)."""
    return np.arange(1, n + 1) - (n + 1) / 2.0


def _split_coefficients(f: ExponentialSum, partition: MatchPartition) -> tuple:
    """Coefficient maps of f restricted to the partition's two sets."""
    terms = f.terms()
    part_freqs = sorted(partition.all_frequencies)
    if part_freqs != sorted(terms):
        raise PreconditionViolated(
            "partition frequencies do not coincide with the sum's support")
    first = {y: terms[y] for y in partition.first_set}
    second = {y: terms[y] for y in partition.second_set}
    return first, second


def check_main_bound(f: ExponentialSum, partition: MatchPartition,
                     grid: SampleGrid, variant: Variant) -> BoundReport:
    """Exact sampled energy of f vs. the decomposition right-hand side.

    MODULATED / WEAKENED use any contiguous grid [A, B]; a grid not starting
    at 1 is absorbed into the coefficients by the unimodular modulation
    c_y -> c_y e^{2 pi i y (A-1)}, which leaves the energy identity intact.
    SYMMETRIC requires an integer grid symmetric about zero ([-m, m]); those
    are the grids on which the phase-free symmetric bound is certified (on
    half-integer sample sets a pair wrapping across 0 flips the sign of the
    Poisson kernel and the printed bound is falsifiable).
    """
    variant = Variant(variant)
    n = grid.size
    first, second = _split_coefficients(f, partition)
    if variant is Variant.SYMMETRIC:
        if grid.start != -grid.end:
            raise PreconditionViolated(
                "the symmetric variant needs a grid [-m, m]")
    else:
        shift = grid.start - 1
        if shift != 0:
            first = {y: c * np.exp(2j * np.pi * y * shift) for y, c in first.items()}
            second = {y: c * np.exp(2j * np.pi * y * shift) for y, c in second.items()}
    lhs = energy(f, grid)
    rhs = main_bound_rhs(partition, first, second, n, variant)
    slack = lhs - rhs
    constants = pair_weights(n)
    constants["n_samples"] = float(n)
    return BoundReport(lhs, rhs, slack, constants, _holds(lhs, slack))


def weighted_frequency_error(matching: MatchPartition,
                             coefficients_f: Mapping,
                             coefficients_g: Mapping,
                             n: int) -> float:
    """Weighted frequency-coefficient error of a total matching.

    sum over pairs of (n+1)/3 |c_y - c_{n(y)}|^2
    + 2 pi^2 (n+1)^3 / 3^5 * |y - n(y)|^2 |c_y + c_{n(y)}|^2,
    with n the half-width of the symmetric grid [-n, n].  Relative to the
    decomposition bound applied to the difference signal the roles of sum
    and difference swap, because the second sum enters negated.
    """
    if matching.unmatched:
        raise UnmatchedFrequencies(
            f"{len(matching.unmatched)} frequencies have no partner")
    coef_weight = (n + 1) / 3.0
    freq_weight = 2.0 * np.pi**2 * (n + 1) ** 3 / 3**5
    total = 0.0
    for a, b in matching.pairs:
        ca = complex(coefficients_f[a])
        cb = complex(coefficients_g[b])
        d = wrap_distance(a, b)
        total += coef_weight * abs(ca - cb) ** 2 + freq_weight * d**2 * abs(ca + cb) ** 2
    return float(total)


class Verdict(enum.Enum):
    CERTIFIED = "Certified"
    PREMISE_FAILED = "PremiseFailed"


@dataclass(frozen=True)
class WellPosednessCertificate:
    """Outcome of the conditional well-posedness check for two sums."""

    premise_value: float
    premise_threshold: float
    premise_holds: bool
    matching: Optional[MatchPartition]
    weighted_error: Optional[float]
    verdict: Verdict

    def to_json(self) -> dict:
        return {
            "premise_value": self.premise_value,
            "premise_threshold": self.premise_threshold,
            "premise_holds": self.premise_holds,
            "weighted_error": self.weighted_error,
            "verdict": self.verdict.value,
        }


def wellposedness_certificate(f: ExponentialSum, g: ExponentialSum,
                              n: int, q: float) -> WellPosednessCertificate:
    """Certify that close samples of f and g on [-n, n] force close terms.

    Requires f, g separated by at least 2q with q >= 3/(2n+2).  If the
    sampling distance sum_{k=-n}^{n} |f(k)-g(k)|^2 is strictly below
    (4n+4)/3 * c_min^2 (c_min the smallest coefficient modulus of either
    sum), a total matching at threshold 3/(2n+2) exists and its weighted
    error is bounded by the sampling distance.
    """
    t = 3.0 / (2 * n + 2)
    if q < t:
        raise ModelViolation(f"q = {q} is below 3/(2n+2) = {t}")
    for name, h in (("f", f), ("g", g)):
        if not meets_separation(separation(h.frequencies), 2 * q):
            raise ModelViolation(
                f"separation of {name} is below 2q = {2 * q}")
    grid = SampleGrid(-n, n)
    premise_value = float(np.sum(np.abs(sample(f, grid) - sample(g, grid)) ** 2))
    c_min = min(f.min_coefficient_modulus, g.min_coefficient_modulus)
    premise_threshold = (4.0 * n + 4.0) / 3.0 * c_min**2
    premise_holds = premise_value < premise_threshold
    if not premise_holds:
        return WellPosednessCertificate(premise_value, premise_threshold, False,
                                        None, None, Verdict.PREMISE_FAILED)
    matching = match_partition(f.frequencies, g.frequencies, t)
    if matching.unmatched:
        raise UnmatchedFrequencies(
            "premise holds but the matching is not total; this contradicts "
            "the certified inequality")
    weighted = weighted_frequency_error(matching, f.terms(), g.terms(), n)
    return WellPosednessCertificate(premise_value, premise_threshold, True,
                                    matching, weighted, Verdict.CERTIFIED)


def vandermonde_bound_separated(n_rows: int, q: float) -> float:
    """Lower bound max(0, N+1-1/q) on sigma_min^2 for q-separated columns."""
    if not q > 0:
        raise ValueError("separation q must be positive")
    return max(0.0, n_rows + 1.0 - 1.0 / q)


def vandermonde_bound_pairs(n_rows: int, q: float, tau: float) -> float:
    """Lower bound on sigma_min^2 for two interleaved separated node sets.

    Requires q >= 3/(N+1); tau is the smallest cross distance.  For
    tau < 3/(N+1) the bound is pi^2 (N+1)^3 tau^2 / (2*3^5), otherwise
    (2/3)(N+1).  The two branches need not meet at the break point.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    threshold = 3.0 / (n_rows + 1)
    if q < threshold:
        raise PreconditionViolated(f"q = {q} is below 3/(N+1) = {threshold}")
    if tau < threshold:
        return float(np.pi**2 * (n_rows + 1) ** 3 * tau**2 / (2.0 * 3**5))
    return 2.0 * (n_rows + 1) / 3.0


def symmetric_energy(f: ExponentialSum, n: int) -> float:
    """Energy over the n symmetric offsets k - (n+1)/2, k = 1..n."""
    return float(np.sum(np.abs(sample_at(f, symmetric_offsets(n))) ** 2))
