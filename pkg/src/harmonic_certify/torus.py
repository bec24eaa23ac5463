"""Exponential sums on the torus T = R/Z.

Data model for finite sums f(x) = sum_y c_y exp(2*pi*i*y*x) with frequencies
y in [0, 1) and nonzero complex coefficients, together with integer sampling,
the wrap-around metric, separation, and the matched/unmatched decomposition of
two frequency sets at a collision threshold.

All objects are immutable after construction and all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AmbiguousMatch

# Largest achievable wrap-around distance; also the separation sentinel for
# sets with fewer than two elements.
TORUS_DIAMETER = 0.5


def wrap_frequency(value: float) -> float:
    """Reduce a real number to its torus representative in [0, 1)."""
    v = float(value) % 1.0
    # x % 1.0 can round up to 1.0 for tiny negative x.
    return 0.0 if v >= 1.0 else v


def wrap_distance(a, b):
    """Wrap-around distance min_k |a - b - k|; scalars or arrays.

    Symmetric, bounded by 1/2, and zero exactly when a and b coincide as
    torus points.
    """
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    out = np.minimum(d, 1.0 - d)
    return float(out) if out.ndim == 0 else out


def signed_wrap(delta):
    """Representative of delta in [-1/2, 1/2); scalars or arrays."""
    out = (np.asarray(delta, dtype=float) + 0.5) % 1.0 - 0.5
    return float(out) if np.ndim(out) == 0 else out


def separation(frequencies) -> float:
    """Minimum pairwise wrap-around distance of a frequency set.

    Sets with fewer than two elements return the torus diameter 1/2, so the
    separation requirement of every bound is vacuously met.
    """
    y = np.unique([wrap_frequency(v) for v in frequencies])
    if y.size <= 1:
        return TORUS_DIAMETER
    gaps = np.diff(np.concatenate([y, [y[0] + 1.0]]))
    return float(np.minimum(gaps, 1.0 - gaps).min())


@dataclass(frozen=True)
class SampleGrid:
    """Contiguous integer sampling range start..end (inclusive)."""

    start: int
    end: int

    def __post_init__(self):
        if self.start != int(self.start) or self.end != int(self.end):
            raise ValueError("grid endpoints must be integers")
        if not self.start < self.end:
            raise ValueError(f"need start < end, got [{self.start}, {self.end}]")

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    def points(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)


class ExponentialSum:
    """A finite exponential sum with distinct torus frequencies.

    Frequencies are reduced modulo 1 at construction and stored sorted
    ascending; coefficient order follows the frequency order.  Coefficients
    must all be nonzero.
    """

    __slots__ = ("frequencies", "coefficients")

    def __init__(self, frequencies, coefficients):
        freqs = np.atleast_1d(np.asarray(
            [wrap_frequency(v) for v in np.atleast_1d(frequencies)], dtype=float))
        coefs = np.atleast_1d(np.asarray(coefficients, dtype=complex))
        if freqs.shape != coefs.shape or freqs.ndim != 1:
            raise ValueError("frequencies and coefficients must be 1-d and aligned")
        if freqs.size == 0:
            raise ValueError("an exponential sum needs at least one term")
        if np.any(coefs == 0):
            raise ValueError("all coefficients must be nonzero")
        order = np.argsort(freqs, kind="stable")
        freqs, coefs = freqs[order], coefs[order]
        if np.any(np.diff(freqs) == 0):
            raise ValueError("frequencies must be pairwise distinct torus points")
        freqs.setflags(write=False)
        coefs.setflags(write=False)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coefs)

    def __setattr__(self, name, value):  # immutable
        raise AttributeError("ExponentialSum is immutable")

    def __len__(self) -> int:
        return self.frequencies.size

    def __repr__(self) -> str:
        terms = ", ".join(f"{y:g}: {c:g}" for y, c in self.terms().items())
        return f"ExponentialSum({{{terms}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExponentialSum):
            return NotImplemented
        return (np.array_equal(self.frequencies, other.frequencies)
                and np.array_equal(self.coefficients, other.coefficients))

    def terms(self) -> dict:
        return dict(zip(self.frequencies.tolist(), self.coefficients.tolist()))

    @property
    def separation(self) -> float:
        return separation(self.frequencies)

    @property
    def min_coefficient_modulus(self) -> float:
        return float(np.abs(self.coefficients).min())

    @property
    def coefficient_norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def evaluate(self, x):
        """Evaluate the sum at real points x (scalar or array)."""
        pts = np.atleast_1d(np.asarray(x, dtype=float))
        vals = np.exp(2j * np.pi * np.outer(pts, self.frequencies)) @ self.coefficients
        return vals[0] if np.ndim(x) == 0 else vals

    def to_json(self) -> dict:
        return {
            "frequencies": self.frequencies.tolist(),
            "coefficients": [[c.real, c.imag] for c in self.coefficients.tolist()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExponentialSum":
        coefs = [complex(re, im) for re, im in obj["coefficients"]]
        return cls(obj["frequencies"], coefs)


def sample(f: ExponentialSum, grid: SampleGrid) -> np.ndarray:
    """Samples f(k) for k = grid.start .. grid.end, in grid order."""
    return f.evaluate(grid.points())


def sample_at(f: ExponentialSum, points) -> np.ndarray:
    """Samples of f at arbitrary real points."""
    return f.evaluate(np.asarray(points, dtype=float))


def energy(f: ExponentialSum, grid: SampleGrid) -> float:
    """Sampled energy sum_k |f(k)|^2 over the grid."""
    return float(np.sum(np.abs(sample(f, grid)) ** 2))


@dataclass(frozen=True)
class MatchPartition:
    """Decomposition of two frequency sets at a collision threshold.

    `pairs` holds (y, partner) with y from the first set, partner from the
    second set and wrap distance strictly below `threshold`.  `unmatched`
    holds the leftover frequencies of both sets, tagged "first" or "second"
    by origin; each of them is at least `threshold` away from every member
    of the other set.
    """

    pairs: tuple
    unmatched: tuple
    threshold: float

    def __post_init__(self):
        if not self.threshold > 0:
            raise ValueError("threshold must be positive")
        object.__setattr__(self, "pairs", tuple((float(a), float(b)) for a, b in self.pairs))
        object.__setattr__(self, "unmatched",
                           tuple((float(v), str(tag)) for v, tag in self.unmatched))
        for _, tag in self.unmatched:
            if tag not in ("first", "second"):
                raise ValueError(f"unknown origin tag {tag!r}")
        first = [a for a, _ in self.pairs] + [v for v, t in self.unmatched if t == "first"]
        second = [b for _, b in self.pairs] + [v for v, t in self.unmatched if t == "second"]
        if len(set(first)) != len(first) or len(set(second)) != len(second):
            raise ValueError("a frequency may appear at most once per set")
        for a, b in self.pairs:
            if not wrap_distance(a, b) < self.threshold:
                raise ValueError(f"paired frequencies {a}, {b} are not within threshold")
        for v, tag in self.unmatched:
            other = second if tag == "first" else first
            for w in other:
                if wrap_distance(v, w) < self.threshold:
                    raise ValueError(
                        f"unmatched frequency {v} is within threshold of {w}")

    @property
    def first_set(self) -> tuple:
        return tuple(a for a, _ in self.pairs) + tuple(
            v for v, t in self.unmatched if t == "first")

    @property
    def second_set(self) -> tuple:
        return tuple(b for _, b in self.pairs) + tuple(
            v for v, t in self.unmatched if t == "second")

    @property
    def all_frequencies(self) -> tuple:
        return tuple(a for a, _ in self.pairs) + tuple(b for _, b in self.pairs) + tuple(
            v for v, _ in self.unmatched)

    @property
    def is_total(self) -> bool:
        return not self.unmatched


def match_partition(first, second, threshold: float) -> MatchPartition:
    """Pair each frequency with its unique partner closer than `threshold`.

    Frequencies without any partner within the threshold (from either set)
    are returned unmatched.  Raises AmbiguousMatch as soon as any frequency
    of either set has two or more candidates within the threshold, since the
    matched decomposition is then not well defined.
    """
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    ya = np.asarray([wrap_frequency(v) for v in first], dtype=float)
    yb = np.asarray([wrap_frequency(v) for v in second], dtype=float)
    pairs = []
    unmatched = []
    if ya.size and yb.size:
        dist = wrap_distance(ya[:, None], yb[None, :])
        close = dist < threshold
        for i, row in enumerate(close):
            hits = np.flatnonzero(row)
            if hits.size > 1:
                raise AmbiguousMatch(
                    f"frequency {ya[i]} has {hits.size} candidates within {threshold}")
        for j, col in enumerate(close.T):
            hits = np.flatnonzero(col)
            if hits.size > 1:
                raise AmbiguousMatch(
                    f"frequency {yb[j]} has {hits.size} candidates within {threshold}")
        matched_b = set()
        for i, row in enumerate(close):
            hits = np.flatnonzero(row)
            if hits.size == 1:
                j = int(hits[0])
                pairs.append((float(ya[i]), float(yb[j])))
                matched_b.add(j)
            else:
                unmatched.append((float(ya[i]), "first"))
        unmatched.extend((float(yb[j]), "second")
                         for j in range(yb.size) if j not in matched_b)
    else:
        unmatched.extend((float(v), "first") for v in ya)
        unmatched.extend((float(v), "second") for v in yb)
    return MatchPartition(tuple(pairs), tuple(unmatched), float(threshold))
