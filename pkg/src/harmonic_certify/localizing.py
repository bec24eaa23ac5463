"""The band-limited minorant of the indicator of [0, 3] and its dilations.

The workhorse is

    phi(x) = sin^2(pi x)/pi^2 * ( (2/3)(1/x - 1/(x-3)) + 1/(x-1)^2 + 1/(x-2)^2 )

which lies below the indicator chi_[0,3] everywhere, has Fourier transform
supported in [-1, 1] with phi_hat(0) = 2, and obeys the spectral-gap bound

    2 - |phi_hat(w)| >= pi^2 w^2      for |w| <= 1/3,
    2 - |phi_hat(w)| >= pi^2 / 9      for 1/3 <= |w| <= 1.

phi is exactly the Hermite interpolant on the integers with nodal data
f(0)=0, f'(0)=2/3, f(1)=f(2)=1, f'(1)=f'(2)=0, f(3)=0, f'(3)=-2/3; the
generic evaluator for such data is `hermite_interpolant`.  Dilating by
3/(N+1) localizes a window of N+1 consecutive samples; `DilatedLocalizer`
carries the dilation identities and the phase of the dilated transform.

All evaluators accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Hermite data (node, value, derivative) that generates phi.  The slope at
#: the outer nodes may be anything in [2/3, 4/3]; 2/3 reproduces the closed
#: form above.
PHI_NODES = ((0, 0.0, 2.0 / 3.0), (1, 1.0, 0.0), (2, 1.0, 0.0), (3, 0.0, -2.0 / 3.0))

#: Half-width of the window around each node inside which the closed form
#: loses precision to 0/0 cancellation and the nodal form is used instead.
_NEAR_NODE = 1e-4


@dataclass(frozen=True)
class HermiteNode:
    """Value and first derivative prescribed at an integer node."""

    node: int
    value: float
    derivative: float


def hermite_interpolant(nodes, x):
    """Band-limited Hermite interpolant with finite nodal data.

    Evaluates sin^2(pi x)/pi^2 * sum_k ( f(k)/(x-k)^2 + f'(k)/(x-k) ) in the
    numerically stable form sum_k sinc^2(x-k) * (f(k) + f'(k)(x-k)), which
    has no removable singularities.  At node integers it returns the stored
    value; at other integers it returns 0.
    """
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs, dtype=float)
    for entry in nodes:
        k, v, s = (entry.node, entry.value, entry.derivative) \
            if isinstance(entry, HermiteNode) else entry
        t = xs - k
        out = out + np.sinc(t) ** 2 * (v + s * t)
    return float(out) if out.ndim == 0 else out


def _phi_closed(x):
    s = np.sin(np.pi * x) ** 2 / np.pi**2
    g = ((2.0 / 3.0) * (1.0 / x - 1.0 / (x - 3.0))
         + 1.0 / (x - 1.0) ** 2 + 1.0 / (x - 2.0) ** 2)
    return s * g


def phi(x):
    """The minorant of chi_[0,3]; scalar in, scalar out (arrays likewise).

    Within 1e-4 of the nodes {0, 1, 2, 3} the closed form is evaluated via
    the Hermite nodal data, which is exact there and avoids 0/0; elsewhere
    the closed form is used directly (its sign structure sin^2 * g makes the
    minorant property hold in floating point as well).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    nearest = np.round(xs)
    near = (nearest >= 0) & (nearest <= 3) & (np.abs(xs - nearest) < _NEAR_NODE)
    out = np.empty_like(xs)
    if np.any(~near):
        out[~near] = _phi_closed(xs[~near])
    if np.any(near):
        out[near] = hermite_interpolant(PHI_NODES, xs[near])
    return float(out[0]) if np.ndim(x) == 0 else out


def phi_hat(w):
    """Fourier transform of phi: exact closed form, zero outside (-1, 1).

    For w in [0, 1]:
        phi_hat(w) = (1 - w)(e^{-2 pi i w} + e^{-4 pi i w})
                     + (1 - e^{-6 pi i w}) / (3 pi i)
    extended conjugate-symmetrically to negative w.  phi_hat(0) = 2 and
    phi_hat(+-1) = 0, so the support cut at |w| >= 1 is continuous.
    """
    ws = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.zeros(ws.shape, dtype=complex)
    a = np.abs(ws)
    inside = a < 1.0
    wa = a[inside]
    val = ((1.0 - wa) * (np.exp(-2j * np.pi * wa) + np.exp(-4j * np.pi * wa))
           + (1.0 - np.exp(-6j * np.pi * wa)) / (3j * np.pi))
    out[inside] = np.where(ws[inside] < 0, np.conj(val), val)
    return complex(out[0]) if np.ndim(w) == 0 else out


def phi_hat_gap(w):
    """The spectral gap 2 - |phi_hat(w)|; requires |w| <= 1."""
    ws = np.asarray(w, dtype=float)
    if np.any(np.abs(ws) > 1.0):
        raise ValueError("the gap is only defined on |w| <= 1")
    out = 2.0 - np.abs(phi_hat(ws))
    return float(out) if np.ndim(w) == 0 else out


@dataclass(frozen=True)
class DilatedLocalizer:
    """phi dilated to minorize a window of n_param + 1 consecutive samples.

    phi_N(x) = phi(3x/(N+1)) <= chi_[0, N+1](x) and
    phi_hat_N(w) = (N+1)/3 * phi_hat((N+1) w / 3), supported in
    [-3/(N+1), 3/(N+1)] with phi_hat_N(0) = 2(N+1)/3.
    """

    n_param: int

    def __post_init__(self):
        if self.n_param < 1:
            raise ValueError("n_param must be a positive integer")

    @property
    def support_radius(self) -> float:
        return 3.0 / (self.n_param + 1)

    def phi(self, x):
        return phi(3.0 * np.asarray(x, dtype=float) / (self.n_param + 1))

    def phi_hat(self, w):
        scale = (self.n_param + 1) / 3.0
        return scale * phi_hat(scale * np.asarray(w, dtype=float))

    def phase(self, w) -> float:
        """Principal argument of the dilated transform at w.

        Returns 0.0 at w = 0 (the transform is positive there) and raises
        outside the open support, where the argument of zero is undefined.
        The printed first-order phase in the source derivation carries a
        stray imaginary unit, so the phase is always computed numerically;
        to first order it behaves like -pi*(N+1)*w.
        """
        wf = float(w)
        if wf == 0.0:
            return 0.0
        if abs(wf) >= self.support_radius:
            raise ValueError(
                f"|w| = {abs(wf)} is outside the open support (radius "
                f"{self.support_radius}); the transform vanishes there")
        return float(np.angle(self.phi_hat(wf)))
