"""Evaluation of the Faddeeva function w(z) over the whole complex plane.

Points are folded into the first quadrant and dispatched to one of three
base evaluators:

* the shifted rational approximation ``w(z) ~ psi(z + i sigma)``,
* a truncated Laplace continued fraction for ``|z| >= z_cf_threshold``,
* a narrow-band blend for ``Im z < y_narrow``,

after which the parity ``w(-x + iy) = conj(w(x + iy))`` and the reflection
``w(-z) = 2 exp(-z^2) - w(z)`` restore the original quadrant.

All evaluators work element-wise on numpy arrays; the scalar entry point
:func:`evaluate` runs the same array code on a one-element batch so that
scalar and batch results are bit-identical.
"""
from __future__ import annotations

import enum
import math
import sys
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import overload

import numpy as np

from .params import ApproximationParams, CoefficientSet, coefficients_for, default_setup

__all__ = [
    "CF_DEPTH",
    "Region",
    "RegionTag",
    "EvaluationResult",
    "BatchResult",
    "FaddeevaError",
    "PoleProximityError",
    "OutOfRangeError",
    "exp_neg_square",
    "psi_eval",
    "w_rational",
    "w_continued_fraction",
    "w_narrow_band",
    "reflect_lower_half",
    "mirror_negative_x",
    "evaluate",
    "evaluate_batch",
    "faddeeva",
]

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

# Smallest depth giving <= 1e-14 componentwise relative error on
# 15 <= |z| <= 1e6, Im z >= 0 (scripts/calibrate_cf_depth.py).
CF_DEPTH = 7

# 2 * exp(t) must stay finite.
_EXP_LIMIT = math.log(sys.float_info.max) - math.log(2.0)
_POLE_TOL = 1e-300

ERR_NONE = 0
ERR_NONFINITE = 1
ERR_OVERFLOW = 2
_ERROR_TEXT = {
    ERR_NONFINITE: "non-finite input",
    ERR_OVERFLOW: "exp(-z^2) overflows double precision",
}


class FaddeevaError(ArithmeticError):
    """Base class for evaluation failures."""


class PoleProximityError(FaddeevaError, ZeroDivisionError):
    pass


class OutOfRangeError(FaddeevaError, OverflowError):
    pass


class Region(enum.IntEnum):
    RATIONAL = 1
    CONTINUED_FRACTION = 2
    NARROW_BAND = 3

    @property
    def label(self) -> str:
        return _REGION_LABELS[self]


_REGION_LABELS = {
    Region.RATIONAL: "Rational",
    Region.CONTINUED_FRACTION: "ContinuedFraction",
    Region.NARROW_BAND: "NarrowBand",
}

# Bit flags packed above the base region in integer region codes.
MIRRORED = 16
REFLECTED = 32
_BASE_MASK = 15


@dataclass(frozen=True)
class RegionTag:
    """Which base evaluator produced a value, and which symmetry wrappers
    were applied to it afterwards."""

    base: Region
    mirrored: bool = False
    reflected: bool = False

    @property
    def wrappers(self) -> tuple[str, ...]:
        """Wrapper names in the order they were applied (innermost first)."""
        out = []
        if self.mirrored:
            out.append("ParityMirrored")
        if self.reflected:
            out.append("ReflectedLowerHalf")
        return tuple(out)

    @property
    def code(self) -> int:
        return int(self.base) | (MIRRORED if self.mirrored else 0) | (REFLECTED if self.reflected else 0)

    @classmethod
    def from_code(cls, code: int) -> RegionTag:
        code = int(code)
        return cls(Region(code & _BASE_MASK), bool(code & MIRRORED), bool(code & REFLECTED))

    @classmethod
    def parse(cls, text: str) -> RegionTag:
        mirrored = reflected = False
        while text.endswith(")"):
            outer, _, inner = text.partition("(")
            if outer == "ReflectedLowerHalf":
                reflected = True
            elif outer == "ParityMirrored":
                mirrored = True
            else:
                raise ValueError(f"unknown region wrapper {outer!r}")
            text = inner[:-1]
        for region, label in _REGION_LABELS.items():
            if label == text:
                return cls(region, mirrored, reflected)
        raise ValueError(f"unknown region {text!r}")

    def __str__(self) -> str:
        s = self.base.label
        for wrapper in self.wrappers:
            s = f"{wrapper}({s})"
        return s


@dataclass(frozen=True)
class EvaluationResult:
    value: complex
    region: RegionTag | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class BatchResult(Sequence):
    """Array-backed sequence of :class:`EvaluationResult`.

    ``values`` holds w for every point (NaN where the point failed),
    ``codes`` the packed region codes (0 on failure) and ``errors`` the
    per-point error codes.
    """

    def __init__(self, values: np.ndarray, codes: np.ndarray, errors: np.ndarray):
        self.values = values
        self.codes = codes
        self.errors = errors

    def __len__(self) -> int:
        return len(self.values)

    @overload
    def __getitem__(self, i: int) -> EvaluationResult: ...
    @overload
    def __getitem__(self, i: slice) -> BatchResult: ...

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BatchResult(self.values[i], self.codes[i], self.errors[i])
        err = int(self.errors[i])
        if err:
            return EvaluationResult(complex(self.values[i]), None, _ERROR_TEXT[err])
        return EvaluationResult(complex(self.values[i]), RegionTag.from_code(self.codes[i]))

    def __iter__(self) -> Iterator[EvaluationResult]:
        for i in range(len(self)):
            yield self[i]

    @property
    def ok(self) -> np.ndarray:
        return self.errors == ERR_NONE

    def region_histogram(self) -> dict[str, int]:
        labels, counts = np.unique(self.codes[self.ok], return_counts=True)
        return {str(RegionTag.from_code(c)): int(n) for c, n in zip(labels, counts)}

    def base_histogram(self) -> dict[str, int]:
        base = self.codes[self.ok] & _BASE_MASK
        return {r.label: int(np.count_nonzero(base == r)) for r in Region}


def _setup(params: ApproximationParams | None, coeffs: CoefficientSet | None):
    if params is None and coeffs is None:
        return default_setup()
    if params is None:
        params = default_setup()[0]
    if coeffs is None:
        coeffs = coefficients_for(params)
    return params, coeffs


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=np.complex128)


def _out(a: np.ndarray):
    return a[()] if a.ndim == 0 else a


def _exp_neg_square_parts(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """exp(-(x+iy)^2) as exp(y^2 - x^2) (cos 2xy - i sin 2xy).

    Returns the values and a mask of points where ``2 exp(-z^2)`` would
    overflow (those values are NaN).
    """
    t = (y - x) * (y + x)
    bad = t > _EXP_LIMIT
    mag = np.exp(np.where(bad, 0.0, t))
    phase = 2.0 * x * y
    out = np.empty(np.shape(t), dtype=np.complex128)
    out.real = mag * np.cos(phase)
    out.imag = -mag * np.sin(phase)
    out[bad] = complex(math.nan, math.nan)
    return out, bad


def exp_neg_square(z):
    """Overflow-guarded exp(-z^2); raises :class:`OutOfRangeError`."""
    z = _as_complex(z)
    val, bad = _exp_neg_square_parts(z.real, z.imag)
    if np.any(bad):
        raise OutOfRangeError(f"exp(-z^2) overflows for z = {complex(z[bad].flat[0])}")
    return _out(val)


def _psi(s: np.ndarray, coeffs: CoefficientSet) -> np.ndarray:
    ss = s * s
    i_s = 1j * s
    out = 1j * coeffs.pole_prefactor / s
    for a, b, c2 in zip(coeffs.A, coeffs.B, coeffs.C2):
        out += (a - i_s * b) / (c2 - ss)
    return out


def _psi_prime(s: np.ndarray, coeffs: CoefficientSet) -> np.ndarray:
    """Term-wise derivative of the rational form with respect to its argument."""
    s = _as_complex(s)
    ss = s * s
    out = -1j * coeffs.pole_prefactor / ss
    for a, b, c2 in zip(coeffs.A, coeffs.B, coeffs.C2):
        den = c2 - ss
        out += (-1j * b * den + 2.0 * s * (a - 1j * s * b)) / (den * den)
    return _out(out)


def psi_eval(z, coeffs: CoefficientSet | None = None):
    """The rational function ``i p / z + sum (A_n - i z B_n) / (C_n^2 - z^2)``.

    ``z`` is the already-shifted argument.  Raises
    :class:`PoleProximityError` if any denominator is within 1e-300 of zero.
    """
    if coeffs is None:
        coeffs = default_setup()[1]
    s = np.atleast_1d(_as_complex(z))
    near = np.abs(s) < _POLE_TOL
    ss = s * s
    for c2 in coeffs.C2:
        near |= np.abs(c2 - ss) < _POLE_TOL
    if np.any(near):
        raise PoleProximityError(f"argument {complex(s[near][0])} is at a pole of the rational form")
    return _out(_psi(s, coeffs).reshape(np.shape(z)))


def w_rational(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """``psi(z + i sigma)``; valid for Im z >= 0, where no pole is reachable."""
    params, coeffs = _setup(params, coeffs)
    z = _as_complex(z)
    if np.any(z.imag < 0):
        raise ValueError("w_rational requires Im(z) >= 0")
    return _out(_psi(z + 1j * params.sigma, coeffs))


def w_continued_fraction(z, depth: int = CF_DEPTH, threshold: float | None = 15.0):
    """Laplace continued fraction

        w(z) = (i/sqrt(pi)) / (z - (1/2) / (z - 1 / (z - (3/2) / (z - ...))))

    truncated after ``depth`` partial numerators and evaluated backwards.
    ``threshold=None`` skips the domain check.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    z = _as_complex(z)
    if threshold is not None and np.any(np.abs(z) < threshold):
        raise ValueError(f"continued fraction used below |z| = {threshold}")
    if np.any(z.imag < 0):
        raise ValueError("w_continued_fraction requires Im(z) >= 0")
    r = np.zeros_like(z)
    for k in range(depth, 0, -1):
        r = (0.5 * k) / (z - r)
    return _out((1j * INV_SQRT_PI) / (z - r))


def w_narrow_band(
    x,
    y,
    params: ApproximationParams | None = None,
    coeffs: CoefficientSet | None = None,
    imag_order: int = 2,
):
    """Small-y approximation anchored at ``z0 = x + i y_min``.

    The real part interpolates linearly between exp(-x^2) on the real axis
    and K(x, y_min).  The imaginary part is L(x, y_min) carried down to the
    target height by a Taylor step of order ``imag_order``, with the
    derivatives of w taken from w' = 2i/sqrt(pi) - 2 z w.  Order 0 keeps
    L(x, y_min) unchanged, which is off by about ``y_min * |dK/dx|``; order 1
    leaves a curvature error near 1e-10 for x ~ 1; order 2 reaches the
    accuracy of the rational form at the anchor.
    """
    if imag_order not in (0, 1, 2):
        raise ValueError("imag_order must be 0, 1 or 2")
    params, coeffs = _setup(params, coeffs)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if np.any(y < 0) or np.any(y >= params.y_narrow):
        raise ValueError("w_narrow_band requires 0 <= y < y_narrow")
    z0 = x + 1j * params.y_min
    w0 = _psi(z0 + 1j * params.sigma, coeffs)
    frac = y / params.y_min
    gauss = np.exp(-(x * x))
    out = np.empty(np.broadcast(x, y).shape, dtype=np.complex128)
    out.real = (1.0 - frac) * gauss + frac * w0.real
    step = 1j * (y - params.y_min)
    im = w0
    if imag_order >= 1:
        w1 = 2j * INV_SQRT_PI - 2.0 * z0 * w0
        im = im + step * w1
        if imag_order == 2:
            w2 = -2.0 * w0 - 2.0 * z0 * w1
            im = im + 0.5 * step * step * w2
    out.imag = np.imag(im)
    return _out(out)


def reflect_lower_half(z, w_upper):
    """``w(z) = 2 exp(-z^2) - w(-z)`` for Im z < 0, given ``w_upper = w(-z)``."""
    z = _as_complex(z)
    if np.any(z.imag >= 0):
        raise ValueError("reflect_lower_half requires Im(z) < 0")
    return _out(2.0 * _as_complex(exp_neg_square(z)) - np.asarray(w_upper, dtype=np.complex128))


def mirror_negative_x(w_pos):
    """``w(-x + iy) = conj(w(x + iy))`` for y >= 0."""
    return _out(np.conj(np.asarray(w_pos, dtype=np.complex128)))


def _cf_branch(q: np.ndarray, depth: int, y_narrow: float) -> np.ndarray:
    """Continued-fraction values for first-quadrant points as dispatched."""
    wc = np.asarray(w_continued_fraction(q, depth, threshold=None), dtype=np.complex128).reshape(q.shape)
    # The truncated fraction lacks the exp(-x^2) real part that survives
    # on the real axis; it only matters for Im z far below y_narrow.
    low = q.imag < y_narrow
    if low.any():
        wc[low] += _exp_neg_square_parts(q.real[low], q.imag[low])[0]
    return wc


def _evaluate_arrays(z: np.ndarray, params: ApproximationParams, coeffs: CoefficientSet):
    z = _as_complex(z).ravel()
    x = np.ascontiguousarray(z.real)
    y = np.ascontiguousarray(z.imag)
    n = len(z)
    finite = np.isfinite(x) & np.isfinite(y)
    ax = np.where(finite, np.abs(x), 0.0)
    ay = np.where(finite, np.abs(y), 0.0)
    q = np.empty(n, dtype=np.complex128)
    q.real = ax
    q.imag = ay

    mag = np.abs(q)
    cf = finite & (mag >= params.z_cf_threshold)
    nb = finite & ~cf & (ay < params.y_narrow)
    rat = finite & ~cf & ~nb

    w = np.full(n, complex(math.nan, math.nan))
    codes = np.zeros(n, dtype=np.int8)
    errors = np.where(finite, ERR_NONE, ERR_NONFINITE).astype(np.int8)

    if rat.any():
        w[rat] = _psi(q[rat] + 1j * params.sigma, coeffs)
        codes[rat] = Region.RATIONAL
    if cf.any():
        w[cf] = _cf_branch(q[cf], CF_DEPTH, params.y_narrow)
        codes[cf] = Region.CONTINUED_FRACTION
    if nb.any():
        w[nb] = w_narrow_band(ax[nb], ay[nb], params, coeffs)
        codes[nb] = Region.NARROW_BAND

    mirrored = finite & (((y < 0) & (x > 0)) | ((y >= 0) & (x < 0)))
    if mirrored.any():
        w[mirrored] = np.conj(w[mirrored])
        codes[mirrored] |= MIRRORED

    reflected = finite & (y < 0)
    if reflected.any():
        e, bad = _exp_neg_square_parts(x[reflected], y[reflected])
        w[reflected] = 2.0 * e - w[reflected]
        codes[reflected] |= REFLECTED
        if bad.any():
            idx = np.flatnonzero(reflected)[bad]
            errors[idx] = ERR_OVERFLOW
    failed = errors != ERR_NONE
    w[failed] = complex(math.nan, math.nan)
    codes[failed] = 0
    return w, codes, errors


def evaluate(
    z: complex, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None
) -> EvaluationResult:
    """w(z) for one point, with the region that produced it.

    Raises ``ValueError`` for non-finite input and :class:`OutOfRangeError`
    when the reflection factor exp(-z^2) overflows.
    """
    params, coeffs = _setup(params, coeffs)
    w, codes, errors = _evaluate_arrays(np.array([z], dtype=np.complex128), params, coeffs)
    if errors[0] == ERR_NONFINITE:
        raise ValueError(f"non-finite argument {z!r}")
    if errors[0] == ERR_OVERFLOW:
        raise OutOfRangeError(f"w({z!r}) out of double range: exp(-z^2) overflows")
    return EvaluationResult(complex(w[0]), RegionTag.from_code(codes[0]))


def evaluate_batch(
    points: Iterable[complex] | np.ndarray,
    params: ApproximationParams | None = None,
    coeffs: CoefficientSet | None = None,
    chunk_size: int | None = None,
) -> BatchResult:
    """Element-wise :func:`evaluate` with a per-point error channel.

    Failing points get NaN values and an error code instead of raising.
    ``chunk_size`` bounds the working memory; results do not depend on it.
    """
    params, coeffs = _setup(params, coeffs)
    if not isinstance(points, np.ndarray):
        points = np.array(list(points), dtype=np.complex128)
    z = _as_complex(points).ravel()
    n = len(z)
    if chunk_size is None or chunk_size >= n:
        return BatchResult(*_evaluate_arrays(z, params, coeffs))
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    w = np.empty(n, dtype=np.complex128)
    codes = np.empty(n, dtype=np.int8)
    errors = np.empty(n, dtype=np.int8)
    for start in range(0, n, chunk_size):
        sl = slice(start, start + chunk_size)
        w[sl], codes[sl], errors[sl] = _evaluate_arrays(z[sl], params, coeffs)
    return BatchResult(w, codes, errors)


def faddeeva(z, params: ApproximationParams | None = None, coeffs: CoefficientSet | None = None):
    """Vectorised w(z).  Accepts scalars or arrays of any shape and raises on
    the first failing point."""
    params, coeffs = _setup(params, coeffs)
    arr = _as_complex(z)
    w, _, errors = _evaluate_arrays(arr, params, coeffs)
    if np.any(errors):
        i = int(np.flatnonzero(errors)[0])
        bad = complex(arr.ravel()[i])
        if errors[i] == ERR_NONFINITE:
            raise ValueError(f"non-finite argument {bad}")
        raise OutOfRangeError(f"w({bad}) out of double range: exp(-z^2) overflows")
    return _out(w.reshape(arr.shape))
