"""Special functions expressed through w(z).

Every function here is a thin identity on top of :func:`faddeeva`; the
exponential factors go through the same overflow-guarded exp(-z^2) kernel
as the core, so extreme arguments raise :class:`OutOfRangeError` rather than
returning inf/nan.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import SQRT_PI, OutOfRangeError, _as_complex, _exp_neg_square_parts, _out, faddeeva
from .params import ApproximationParams, CoefficientSet

__all__ = [
    "VoigtPair",
    "voigt",
    "erf_complex",
    "erfc_scaled",
    "dawson",
    "plasma_dispersion",
    "fresnel",
    "normal_distribution",
]

_SQRT2 = math.sqrt(2.0)


class VoigtPair(NamedTuple):
    K: float | np.ndarray
    L: float | np.ndarray


def _exp_neg_sq(z: np.ndarray) -> np.ndarray:
    val, bad = _exp_neg_square_parts(z.real, z.imag)
    if np.any(bad):
        raise OutOfRangeError(f"exp(-z^2) overflows for z = {complex(z[bad].flat[0])}")
    return val


def voigt(x, y, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None) -> VoigtPair:
    """Voigt function K = Re w(x + iy) and its companion L = Im w(x + iy), y >= 0."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0):
        raise ValueError("voigt is defined here for y >= 0")
    w = np.asarray(faddeeva(x + 1j * y, params, coeffs))
    return VoigtPair(_out(np.real(w)), _out(np.imag(w)))


def erfc_scaled(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """exp(z^2) erfc(z) = w(iz)."""
    z = _as_complex(z)
    return faddeeva(1j * z, params, coeffs)


def erf_complex(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """erf(z) = 1 - exp(-z^2) w(iz)."""
    z = _as_complex(z)
    e = _exp_neg_sq(z)
    return _out(1.0 - e * np.asarray(faddeeva(1j * z, params, coeffs)))


def dawson(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """Dawson integral daw(z) = sqrt(pi) (w(z) - exp(-z^2)) / (2i)."""
    z = _as_complex(z)
    e = _exp_neg_sq(z)
    return _out(SQRT_PI * (np.asarray(faddeeva(z, params, coeffs)) - e) / 2j)


def plasma_dispersion(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """Plasma dispersion function Z(z) = i sqrt(pi) w(z)."""
    return _out(1j * SQRT_PI * np.asarray(faddeeva(z, params, coeffs)))


def fresnel(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """Fresnel integral of the first kind, int_0^z exp(i pi t^2 / 2) dt.

    Uses F(z) = (1+i)/2 [1 - exp(i pi z^2 / 2) w(sqrt(pi) (1+i) z / 2)].
    The inner argument lies in the lower half-plane when Re z < 0 < Im z or
    vice versa, so the reflection path (and its overflow limit) applies.
    """
    z = _as_complex(z)
    u = 0.5 * SQRT_PI * (1 + 1j) * z
    # exp(i pi z^2 / 2) = exp(-(u')^2) with u' = sqrt(pi)/2 (1-i) z
    e = _exp_neg_sq(0.5 * SQRT_PI * (1 - 1j) * z)
    return _out(0.5 * (1 + 1j) * (1.0 - e * np.asarray(faddeeva(u, params, coeffs))))


def normal_distribution(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """Phi(z) = (2 pi)^(-1/2) int_0^z exp(-t^2/2) dt = erf(z / sqrt 2) / 2.

    Note there is no +1/2 offset: Phi(0) = 0, Phi(inf) = 1/2.
    """
    z = _as_complex(z)
    v = z / _SQRT2
    e = _exp_neg_sq(v)
    return _out(0.5 * (1.0 - e * np.asarray(faddeeva(1j * v, params, coeffs))))
