"""Approximation parameters and the precomputed expansion coefficients.

The rational approximation is fully determined by the number of summation
terms ``N``, the shift constant ``sigma`` and the Gaussian margin
``t_margin``.  Everything the evaluators need is derived from those once and
frozen, so a single :class:`CoefficientSet` can be shared by any number of
callers.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from os import PathLike

import numpy as np

__all__ = [
    "ApproximationParams",
    "CoefficientSet",
    "CONFIG_KEYS",
    "make_params",
    "derive_coefficients",
    "coefficients_for",
    "default_setup",
    "load_config",
    "params_from_config",
]

CONFIG_KEYS = ("N", "sigma", "y_min", "y_narrow", "z_cf_threshold")


@dataclass(frozen=True)
class ApproximationParams:
    """Tunable constants of the method.

    ``nu_m`` and ``h_i`` are not constructor arguments: they follow from
    ``t_margin`` and ``N`` (``nu_m = t_margin / 2pi``, ``h_i = nu_m / N``).
    """

    N: int = 16
    sigma: float = 1.5
    t_margin: float = 6.0
    y_min: float = 1e-5
    y_narrow: float = 1e-6
    z_cf_threshold: float = 15.0
    nu_m: float = field(init=False)
    h_i: float = field(init=False)

    def __post_init__(self) -> None:
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("sigma", "t_margin", "y_min", "y_narrow", "z_cf_threshold"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.sigma < 1.0:
            raise ValueError(f"sigma must be >= 1 for the shifted kernel to be valid, got {self.sigma}")
        if self.t_margin <= 0:
            raise ValueError(f"t_margin must be positive, got {self.t_margin}")
        if not 0.0 < self.y_narrow < self.y_min < 1.0:
            raise ValueError(
                f"need 0 < y_narrow < y_min < 1, got y_narrow={self.y_narrow}, y_min={self.y_min}"
            )
        if self.z_cf_threshold <= 0:
            raise ValueError(f"z_cf_threshold must be positive, got {self.z_cf_threshold}")
        nu_m = self.t_margin / (2.0 * math.pi)
        object.__setattr__(self, "nu_m", nu_m)
        object.__setattr__(self, "h_i", nu_m / self.N)


def make_params(
    N: int = 16,
    sigma: float = 1.5,
    y_min: float = 1e-5,
    y_narrow: float = 1e-6,
    z_cf_threshold: float = 15.0,
    t_margin: float = 6.0,
) -> ApproximationParams:
    return ApproximationParams(
        N=N,
        sigma=sigma,
        t_margin=t_margin,
        y_min=y_min,
        y_narrow=y_narrow,
        z_cf_threshold=z_cf_threshold,
    )


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """Coefficient arrays ``A``, ``B``, ``C`` (index 0 holds n = 1) and the
    numerator ``pole_prefactor = 2 h_i exp(sigma^2)`` of the 1/z term."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    pole_prefactor: float
    C2: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.C)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def derive_coefficients(params: ApproximationParams) -> CoefficientSet:
    h, s = params.h_i, params.sigma
    n = np.arange(1, params.N + 1, dtype=np.float64)
    damping = np.exp(s * s - (2.0 * math.pi * h * n) ** 2)
    phase = 4.0 * math.pi * h * n * s
    A = 8.0 * math.pi * h * h * n * damping * np.sin(phase)
    B = 4.0 * h * damping * np.cos(phase)
    C = 2.0 * math.pi * h * n
    return CoefficientSet(
        A=_frozen(A),
        B=_frozen(B),
        C=_frozen(C),
        pole_prefactor=2.0 * h * math.exp(s * s),
        C2=_frozen(C * C),
    )


@functools.lru_cache(maxsize=32)
def coefficients_for(params: ApproximationParams) -> CoefficientSet:
    """Memoised :func:`derive_coefficients`."""
    return derive_coefficients(params)


def default_setup() -> tuple[ApproximationParams, CoefficientSet]:
    params = ApproximationParams()
    return params, coefficients_for(params)


def load_config(path: str | PathLike[str]) -> dict[str, float]:
    """Read a ``key=value`` file.  Blank lines and ``#`` comments are skipped;
    unknown keys are an error."""
    values: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r} (allowed: {', '.join(CONFIG_KEYS)})")
            try:
                values[key] = int(value) if key == "N" else float(value)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return values


def params_from_config(path: str | PathLike[str] | None = None, **overrides) -> ApproximationParams:
    settings = load_config(path) if path is not None else {}
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return make_params(**settings)
