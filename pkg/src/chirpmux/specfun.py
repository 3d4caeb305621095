"""Special-function numerics used by the correlation and error-rate modules.

The workhorse is the oscillatory quadratic-phase integral

    I = integral_lower^upper exp(j*2*pi*(curvature*t^2/2 + slope*t)) dt,

which is the exact cross-term between two line-segment frequency models.
It is evaluated in closed form through the real Fresnel integrals C and S
rather than a complex imaginary-error-function: completing the square gives

    I = exp(-j*pi*slope'^2/curvature) / sqrt(2*|curvature|)
        * [ (C(z2) - C(z1)) +/- j*(S(z2) - S(z1)) ],

with z = sqrt(2*|curvature|) * (t + slope'/curvature) and the sign of the
imaginary part following the sign of the curvature (negative curvature is
the complex conjugate problem).  All phases are referenced to the interval
midpoint first, which keeps the arguments moderate and the evaluation
stable when the stationary point lies far outside the interval.

When |curvature| * width^2 falls below CURVATURE_EPS the quadratic term is
numerically stationary over the interval and the integral degenerates to
the linear-phase result w * sinc(slope_mid * w) about the midpoint; the
further slope degeneracy (integrand constant over the interval, limit =
width) is absorbed by the sinc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "ERFI_OVERFLOW_LIMIT",
    "CURVATURE_EPS",
    "QuadPhaseIntegral",
    "erfi",
    "q_function",
    "quad_phase_integral",
    "quad_phase_values",
]

# erfi grows like exp(x^2)/(x*sqrt(pi)); beyond this the result overflows
# a double (26.7^2 > log(realmax) = 709.78).
ERFI_OVERFLOW_LIMIT = 26.6

# |curvature| * width^2 threshold for the stationary (linear-phase) limit.
CURVATURE_EPS = 1e-9


def erfi(x):
    """Imaginary error function ``erfi(x) = -i erf(i x)`` for real ``x``.

    Odd, real-valued, and rapidly growing; inputs with ``|x|`` beyond
    :data:`ERFI_OVERFLOW_LIMIT` raise :class:`OverflowError` instead of
    silently returning ``inf``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("erfi requires finite input")
    if np.any(np.abs(arr) > ERFI_OVERFLOW_LIMIT):
        raise OverflowError(
            f"erfi argument beyond +/-{ERFI_OVERFLOW_LIMIT} overflows double "
            "precision (erfi grows like exp(x^2))"
        )
    out = _sp.erfi(arr)
    return out if out.ndim else float(out)


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(N(0,1) > x) = erfc(x/sqrt(2))/2``."""
    out = 0.5 * _sp.erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class QuadPhaseIntegral:
    """Definite integral of ``exp(j*2*pi*(curvature/2*t^2 + slope*t))``.

    ``curvature`` is in Hz/s, ``slope`` in Hz, limits in seconds.
    """

    curvature: float
    slope: float
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not self.upper >= self.lower:
            raise ValueError("upper limit must be >= lower limit")


def quad_phase_values(curvature, slope, lower, upper) -> np.ndarray:
    """Vectorized quadratic-phase integrals (see module docstring)."""
    c, g, lo, hi = np.broadcast_arrays(
        np.asarray(curvature, dtype=float),
        np.asarray(slope, dtype=float),
        np.asarray(lower, dtype=float),
        np.asarray(upper, dtype=float),
    )
    c = np.ravel(c).copy()
    g = np.ravel(g)
    lo = np.ravel(lo)
    hi = np.ravel(hi)

    width = hi - lo
    mid = 0.5 * (hi + lo)
    slope_mid = g + c * mid  # instantaneous frequency at the midpoint
    phase_mid = 2.0 * np.pi * mid * (0.5 * c * mid + g)

    out = np.empty(c.shape, dtype=complex)

    degen = np.abs(c) * width**2 < CURVATURE_EPS
    out[degen] = width[degen] * np.sinc(slope_mid[degen] * width[degen])

    full = ~degen
    if np.any(full):
        a = np.abs(c[full])
        neg = c[full] < 0.0
        gm = np.where(neg, -slope_mid[full], slope_mid[full])
        scale = np.sqrt(2.0 * a)
        shift = gm / a
        s1, c1 = _sp.fresnel(scale * (shift - 0.5 * width[full]))
        s2, c2 = _sp.fresnel(scale * (shift + 0.5 * width[full]))
        core = (
            np.exp(-1j * np.pi * gm * shift)
            * ((c2 - c1) + 1j * (s2 - s1))
            / scale
        )
        out[full] = np.where(neg, np.conj(core), core)

    out *= np.exp(1j * phase_mid)
    shape = np.broadcast_shapes(
        np.shape(curvature), np.shape(slope), np.shape(lower), np.shape(upper)
    )
    return out.reshape(shape)


def quad_phase_integral(q: QuadPhaseIntegral) -> complex:
    """Evaluate one quadratic-phase integral in closed form."""
    return complex(quad_phase_values(q.curvature, q.slope, q.lower, q.upper))
