"""Invariant suites that need no cached reference data.

Each suite returns a :class:`SuiteResult` holding the worst residual, the
point where it occurred and the tolerance it is held to.  Tolerances carry
at least a factor of ten of headroom over the residuals observed across
seeds, so a pass/fail verdict does not depend on the seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import related as rf
from .core import SQRT_PI, _psi, _psi_prime, exp_neg_square, faddeeva
from .params import ApproximationParams, CoefficientSet, coefficients_for

__all__ = ["SuiteResult", "SUITES", "run_suites"]

_TWO_I_SQRT_PI = 2j / SQRT_PI


@dataclass(frozen=True)
class SuiteResult:
    name: str
    worst: float
    where: complex
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tolerance)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.name:<12} {verdict}  worst {self.worst:.3e} (tol {self.tolerance:.0e}) at z = {self.where:.6g}"


def _worst(name: str, z: np.ndarray, residual: np.ndarray, tol: float) -> SuiteResult:
    i = int(np.argmax(residual))
    return SuiteResult(name, float(residual[i]), complex(z[i]), tol)


def _disc(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    return r * np.exp(2j * math.pi * rng.random(n))


def reflection_suite(params, coeffs, rng) -> SuiteResult:
    """w(-z) = 2 exp(-z^2) - w(z), both sides through the dispatcher.

    The residual is scaled by the size of the terms being subtracted: when
    Im z < 0 both terms on the right are near 2 exp(-z^2), which can exceed
    w(-z) by fifteen orders of magnitude, and forming their difference in
    double precision alone leaves an error of order eps |exp(-z^2)|.
    """
    z = _disc(rng, 1000, 6.0)
    z = z[z.imag != 0]
    e2 = 2.0 * exp_neg_square(z)
    wz = faddeeva(z, params, coeffs)
    lhs = faddeeva(-z, params, coeffs)
    scale = np.maximum(np.abs(lhs), np.abs(e2) + np.abs(wz))
    return _worst("reflection", z, np.abs(lhs - (e2 - wz)) / scale, 1e-13)


def parity_suite(params, coeffs, rng) -> SuiteResult:
    """w(-x + iy) = conj(w(x + iy)) exactly for y >= y_narrow."""
    x = 20.0 * rng.random(500)
    y = 10.0 ** rng.uniform(math.log10(params.y_narrow), 2.0, 500)
    z = x + 1j * y
    d = np.abs(faddeeva(-x + 1j * y, params, coeffs) - np.conj(faddeeva(z, params, coeffs)))
    ulp = np.spacing(np.abs(faddeeva(z, params, coeffs)))
    return _worst("parity", z, d / ulp, 1.0)


def ode_suite(params, coeffs, rng) -> SuiteResult:
    """psi'(s) + 2 z psi(s) = 2i/sqrt(pi) with s = z + i sigma."""
    z = 10.0 * rng.random(100) + 1j * rng.uniform(0.1, 10.0, 100)
    s = z + 1j * params.sigma
    r = _psi_prime(s, coeffs) + 2.0 * z * _psi(s, coeffs) - _TWO_I_SQRT_PI
    return _worst("ode", z, np.abs(r) / abs(_TWO_I_SQRT_PI), 1e-9)


def limit_suite(params, coeffs, rng) -> SuiteResult:
    """w(0) = 1 and w(x) = exp(-x^2) + 2i daw(x)/sqrt(pi) on the real axis."""
    from .oracle import oracle_daw  # extended precision, computed on the spot

    xs = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
    w = faddeeva(xs + 0j, params, coeffs)
    ref = np.array([math.exp(-x * x) + _TWO_I_SQRT_PI * float(oracle_daw(x).re) for x in xs])
    return _worst("limit", xs + 0j, np.abs(w - ref) / np.abs(ref), 1e-8)


def related_suite(params, coeffs, rng) -> SuiteResult:
    """The identity web linking erf, daw, Phi and w, plus oddness."""
    z = _disc(rng, 100, 1.5)
    z = np.abs(z.real) * np.sign(rng.random(100) - 0.5) + 1j * np.abs(z.imag)
    kw = dict(params=params, coeffs=coeffs)
    e = exp_neg_square(z)
    w = faddeeva(z, **kw)
    checks = [
        np.abs(rf.erf_complex(z, **kw) + e * faddeeva(1j * z, **kw) - 1.0),
        np.abs(_TWO_I_SQRT_PI * rf.dawson(z, **kw) + e - w),
        np.abs(rf.normal_distribution(z, **kw) - 0.5 * rf.erf_complex(z / math.sqrt(2.0), **kw)),
    ]
    for f in (rf.erf_complex, rf.dawson, rf.fresnel, rf.normal_distribution):
        checks.append(np.abs(f(-z, **kw) + f(z, **kw)))
    return _worst("related", z, np.max(checks, axis=0), 1e-13)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "reflection": reflection_suite,
    "parity": parity_suite,
    "ode": ode_suite,
    "limit": limit_suite,
    "related": related_suite,
}


def run_suites(
    params: ApproximationParams | None = None,
    coeffs: CoefficientSet | None = None,
    seed: int = 0,
    names: list[str] | None = None,
) -> list[SuiteResult]:
    params = params or ApproximationParams()
    coeffs = coeffs or coefficients_for(params)
    out = []
    for name in names or list(SUITES):
        rng = np.random.default_rng([seed, len(out)])
        out.append(SUITES[name](params, coeffs, rng))
    return out
