"""Relative-error maps, HITRAN-domain sampling and the cosine-kernel curves.

Reference values come from :mod:`faddeeva_fourier.oracle`, normally through
a cached file.  Each reference component is carried as a double-double pair
(``hi + lo``) so that the relative error of a double-precision approximation
is computed without rounding the reference first.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterable, Iterator, Sequence

import mpmath as mp
import numpy as np

from .core import SQRT_PI, _evaluate_arrays, evaluate_batch
from .oracle import OracleCache, OracleCacheMiss, OracleValue, oracle_w
from .params import ApproximationParams, CoefficientSet, coefficients_for

__all__ = [
    "LOG_FLOOR",
    "HITRAN_X",
    "HITRAN_Y",
    "HITRAN_SUBSAMPLE",
    "DEFAULT_SEED",
    "CORE_GRID",
    "ErrorMapGrid",
    "ReferenceArrays",
    "reference_arrays",
    "relative_errors",
    "grid_axes",
    "grid_signature",
    "sweep_domain",
    "hitran_points",
    "hitran_chunks",
    "hitran_signature",
    "hitran_accuracy_sample",
    "cf_points",
    "cf_signature",
    "sample_cosine_kernel",
    "kernel_peak_ratio",
    "emit_map_csv",
    "write_map_rows",
    "read_map_csv",
    "decade_maxima",
]

LOG_FLOOR = -20.0
"""log10 error recorded for a cell where approximation and reference agree exactly."""

HITRAN_X = (0.0, 40000.0)
HITRAN_Y = (1e-4, 1e2)
HITRAN_SUBSAMPLE = 10_000
DEFAULT_SEED = 20_190_304

CORE_GRID = dict(x_range=(0.0, 15.0), y_range=(1e-6, 15.0), nx=100, ny=100, y_log=True)


# --- relative errors ----------------------------------------------------------


@dataclass(frozen=True)
class ReferenceArrays:
    """Reference components as unevaluated sums ``hi + lo`` of doubles."""

    re_hi: np.ndarray
    re_lo: np.ndarray
    im_hi: np.ndarray
    im_lo: np.ndarray

    def __len__(self) -> int:
        return len(self.re_hi)

    @property
    def value(self) -> np.ndarray:
        return self.re_hi + 1j * self.im_hi


def _split(v: mp.mpf) -> tuple[float, float]:
    with mp.workdps(40):
        hi = float(v)
        return hi, float(v - hi)


def reference_arrays(refs: Iterable[OracleValue]) -> ReferenceArrays:
    refs = list(refs)
    out = np.zeros((4, len(refs)))
    for i, r in enumerate(refs):
        out[0, i], out[1, i] = _split(r.re)
        out[2, i], out[3, i] = _split(r.im)
    return ReferenceArrays(*out)


def _component_error(approx: np.ndarray, hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        err = np.abs((hi - approx) + lo) / np.abs(hi)
    return np.where(hi == 0.0, np.nan, err)


def relative_errors(approx, ref: OracleValue | ReferenceArrays | Sequence[OracleValue]):
    """Componentwise ``|ref - approx| / |ref|`` for the real and imaginary parts.

    A reference component that is exactly zero gives ``nan`` (undefined)
    rather than ``inf``.  Scalar inputs give a pair of floats, array inputs a
    pair of arrays.
    """
    scalar = isinstance(ref, OracleValue)
    if not isinstance(ref, ReferenceArrays):
        ref = reference_arrays([ref] if scalar else ref)
    approx = np.asarray(approx, dtype=np.complex128).reshape(-1)
    if len(approx) != len(ref):
        raise ValueError(f"{len(approx)} approximations for {len(ref)} references")
    dre = _component_error(approx.real, ref.re_hi, ref.re_lo)
    dim = _component_error(approx.imag, ref.im_hi, ref.im_lo)
    if scalar:
        return float(dre[0]), float(dim[0])
    return dre, dim


def _log10_field(err: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = np.log10(err)
    return np.where(err == 0.0, LOG_FLOOR, np.maximum(out, LOG_FLOOR))


# --- error maps ---------------------------------------------------------------


def _stats(log10_dre: np.ndarray, log10_dim: np.ndarray) -> dict[str, float]:
    dre = 10.0 ** log10_dre
    dim = 10.0 ** log10_dim

    def agg(f, a):
        a = a[np.isfinite(a)]
        return float(f(a)) if a.size else math.nan

    return {
        "max_dre": agg(np.max, dre),
        "max_dim": agg(np.max, dim),
        "mean_dre": agg(np.mean, dre),
        "mean_dim": agg(np.mean, dim),
    }


@dataclass(frozen=True, eq=False)
class ErrorMapGrid:
    """log10 relative-error fields, indexed ``[iy, ix]``.

    Statistics are derived from the log fields, so a grid read back from its
    CSV reproduces them exactly.  ``nan`` cells are excluded.
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    log10_dre: np.ndarray
    log10_dim: np.ndarray
    stats: dict[str, float] = field(init=False)

    def __post_init__(self) -> None:
        shape = (len(self.y_axis), len(self.x_axis))
        for name in ("log10_dre", "log10_dim"):
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        object.__setattr__(self, "stats", _stats(self.log10_dre, self.log10_dim))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ErrorMapGrid):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k), equal_nan=True)
            for k in ("x_axis", "y_axis", "log10_dre", "log10_dim")
        )

    def restrict(self, y_max: float) -> ErrorMapGrid:
        keep = self.y_axis <= y_max
        return ErrorMapGrid(self.x_axis, self.y_axis[keep], self.log10_dre[keep], self.log10_dim[keep])

    def worst_cell(self, part: str = "dre") -> tuple[float, float, float]:
        """(x, y, log10 error) of the largest error in ``part``."""
        f = self.log10_dre if part == "dre" else self.log10_dim
        iy, ix = np.unravel_index(np.nanargmax(f), f.shape)
        return float(self.x_axis[ix]), float(self.y_axis[iy]), float(f[iy, ix])


def grid_axes(x_range, y_range, nx: int, ny: int, y_log: bool = True) -> tuple[np.ndarray, np.ndarray]:
    if nx < 1 or ny < 1:
        raise ValueError("grid needs at least one point per axis")
    x0, x1 = map(float, x_range)
    y0, y1 = map(float, y_range)
    x = np.linspace(x0, x1, nx)
    if y_log:
        if y0 <= 0 or y1 <= 0:
            raise ValueError("log-spaced y needs a positive range")
        y = np.geomspace(y0, y1, ny)
    else:
        y = np.linspace(y0, y1, ny)
    return x, y


def grid_signature(x_range, y_range, nx: int, ny: int, y_log: bool = True) -> str:
    x0, x1 = map(float, x_range)
    y0, y1 = map(float, y_range)
    return f"grid x={x0!r}:{x1!r}:{nx} y={y0!r}:{y1!r}:{ny}:{'log' if y_log else 'lin'}"


def _check_signature(cache: OracleCache, expected: str) -> None:
    found = cache.meta.get("signature")
    if found != expected:
        raise OracleCacheMiss(f"oracle cache holds {found!r}; expected grid signature {expected!r}")


def _references(points: np.ndarray, cache: OracleCache | None, with_oracle: bool, digits: int) -> ReferenceArrays:
    if cache is not None:
        refs = [cache.lookup(z.real, z.imag) for z in points]
    elif with_oracle:
        refs = [oracle_w(complex(z), digits) for z in points]
    else:
        raise OracleCacheMiss("no oracle cache given and oracle evaluation not requested")
    return reference_arrays(refs)


def _evaluate_chunked(z: np.ndarray, params: ApproximationParams, coeffs: CoefficientSet, chunks: int) -> np.ndarray:
    parts = [_evaluate_arrays(part, params, coeffs)[0] for part in np.array_split(z, max(1, chunks))]
    return np.concatenate(parts) if parts else np.zeros(0, complex)


def sweep_domain(
    x_range=CORE_GRID["x_range"],
    y_range=CORE_GRID["y_range"],
    nx: int = 100,
    ny: int = 100,
    y_log: bool = True,
    params: ApproximationParams | None = None,
    coeffs: CoefficientSet | None = None,
    *,
    cache: OracleCache | None = None,
    with_oracle: bool = False,
    chunks: int = 1,
    digits: int = 30,
) -> ErrorMapGrid:
    """Evaluate w on an ``ny x nx`` grid and compare with the oracle.

    With a cache, its signature must match the requested grid; a missing
    point raises :class:`OracleCacheMiss` rather than being recomputed.
    """
    params = params or ApproximationParams()
    coeffs = coeffs or coefficients_for(params)
    x, y = grid_axes(x_range, y_range, nx, ny, y_log)
    if cache is not None:
        _check_signature(cache, grid_signature(x_range, y_range, nx, ny, y_log))
    z = (x[None, :] + 1j * y[:, None]).reshape(-1)
    approx = _evaluate_chunked(z, params, coeffs, chunks)
    dre, dim = relative_errors(approx, _references(z, cache, with_oracle, digits))
    shape = (ny, nx)
    return ErrorMapGrid(x, y, _log10_field(dre).reshape(shape), _log10_field(dim).reshape(shape))


def decade_maxima(grid: ErrorMapGrid, part: str = "dre", y_lo: float = 1e-6, y_hi: float = 1e-2) -> list[tuple[float, float]]:
    """Largest log10 error per decade of y, over all x: ``[(decade_start, max), ...]``."""
    f = grid.log10_dre if part == "dre" else grid.log10_dim
    out = []
    start = y_lo
    while start < y_hi * (1 - 1e-12):
        stop = start * 10
        rows = (grid.y_axis >= start * (1 - 1e-12)) & (grid.y_axis < stop * (1 - 1e-12))
        if np.any(rows):
            out.append((start, float(np.nanmax(f[rows]))))
        start = stop
    return out


# --- sampled domains -------------------------------------------------------------


def hitran_points(count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """``count`` points, x uniform on [0, 40000], y log-uniform on [1e-4, 1e2].

    The stream is filled row by row, so the first k points do not depend
    on ``count``.
    """
    parts = list(hitran_chunks(count, seed, max(count, 1)))
    return parts[0] if parts else np.zeros(0, dtype=np.complex128)


def hitran_chunks(count: int, seed: int = DEFAULT_SEED, chunk: int = 1_000_000) -> Iterator[np.ndarray]:
    """:func:`hitran_points` delivered in pieces of at most ``chunk`` points;
    the concatenation equals ``hitran_points(count, seed)``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = np.random.default_rng(seed)
    ly0, ly1 = math.log10(HITRAN_Y[0]), math.log10(HITRAN_Y[1])
    done = 0
    while done < count:
        k = min(chunk, count - done)
        u = rng.random((k, 2))
        x = HITRAN_X[0] + (HITRAN_X[1] - HITRAN_X[0]) * u[:, 0]
        yield x + 1j * 10.0 ** (ly0 + (ly1 - ly0) * u[:, 1])
        done += k


def hitran_signature(count: int, seed: int) -> str:
    return f"hitran count={count} seed={seed}"


def cf_points(count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Upper-half-plane points with |z| log-uniform on [15, 1e6].

    Half the arguments are uniform in [0, pi]; the other half hug the real
    axis (Im z log-uniform on [1e-8, 1]), where the fraction converges
    slowest.
    """
    rng = np.random.default_rng(seed)
    r = 10.0 ** rng.uniform(math.log10(15.0), 6.0, count)
    theta = rng.uniform(0.0, math.pi, count)
    near = rng.random(count) < 0.5
    y_near = 10.0 ** rng.uniform(-8.0, 0.0, count)
    sign = np.where(rng.random(count) < 0.5, -1.0, 1.0)
    x_near = sign * np.sqrt(np.maximum(r * r - y_near * y_near, 0.0))
    return np.where(near, x_near + 1j * y_near, r * np.cos(theta) + 1j * r * np.sin(theta))


def cf_signature(count: int, seed: int) -> str:
    return f"cf count={count} seed={seed}"


def hitran_accuracy_sample(
    count: int,
    seed: int = DEFAULT_SEED,
    params: ApproximationParams | None = None,
    coeffs: CoefficientSet | None = None,
    *,
    cache: OracleCache | None = None,
    with_oracle: bool = False,
    subsample: int = HITRAN_SUBSAMPLE,
    digits: int = 30,
) -> dict[str, float]:
    """Evaluate ``count`` HITRAN-domain points; score the first
    ``min(count, subsample)`` of them against the oracle."""
    params = params or ApproximationParams()
    coeffs = coeffs or coefficients_for(params)
    z = hitran_points(count, seed)
    values = evaluate_batch(z, params, coeffs).values
    k = min(count, subsample)
    if k == 0:
        return {"count": 0, "scored": 0, "mean_dre": math.nan, "mean_dim": math.nan, "max_dre": math.nan, "max_dim": math.nan}
    dre, dim = relative_errors(values[:k], _references(z[:k], cache, with_oracle, digits))
    return {
        "count": count,
        "scored": k,
        "mean_dre": float(np.nanmean(dre)),
        "mean_dim": float(np.nanmean(dim)),
        "max_dre": float(np.nanmax(dre)),
        "max_dim": float(np.nanmax(dim)),
    }


# --- cosine kernel ------------------------------------------------------------


def sample_cosine_kernel(sigma: float, t_max: float, nt: int, params: ApproximationParams | None = None) -> np.ndarray:
    """Columns ``t, approx, exact`` for the damped Gaussian kernel
    exp(-t^2/4) exp(-sigma t) and its truncated cosine series, whose
    periodic images sit at multiples of 1/h_i."""
    if nt < 2:
        raise ValueError("need at least two samples")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    params = params or ApproximationParams()
    h = params.h_i
    t = np.linspace(0.0, t_max, nt)
    n = np.arange(1, params.N + 1)
    c = 2.0 * math.pi * h * n
    series = 1.0 + 2.0 * (np.exp(-c * c)[None, :] * np.cos(np.outer(t, c))).sum(axis=1)
    damp = np.exp(-sigma * t)
    approx = 2.0 * SQRT_PI * h * series * damp
    exact = np.exp(-0.25 * t * t) * damp
    return np.column_stack([t, approx, exact])


def kernel_peak_ratio(samples: np.ndarray, period: float, k: int) -> float:
    """max |approx| within period/4 of ``k * period``, divided by the max
    over the flanks period/4 to period/2 away."""
    t, approx = samples[:, 0], np.abs(samples[:, 1])
    d = np.abs(t - k * period)
    core = d <= 0.25 * period
    flank = (d > 0.25 * period) & (d <= 0.5 * period)
    if not core.any() or not flank.any():
        raise ValueError(f"samples do not cover t = {k} * {period}")
    return float(approx[core].max() / approx[flank].max())


# --- CSV ----------------------------------------------------------------------

_MAP_HEADER = ["x", "y", "log10_dre", "log10_dim"]


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else format(v, ".17g")


def emit_map_csv(grid: ErrorMapGrid, path: str | PathLike[str]) -> None:
    """Write ``x,y,log10_dre,log10_dim`` rows, y outer, x inner."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_map_rows(grid, fh)


def write_map_rows(grid: ErrorMapGrid, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(_MAP_HEADER)
    for iy, y in enumerate(grid.y_axis):
        for ix, x in enumerate(grid.x_axis):
            w.writerow([_fmt(x), _fmt(y), _fmt(grid.log10_dre[iy, ix]), _fmt(grid.log10_dim[iy, ix])])


def read_map_csv(path: str | PathLike[str]) -> ErrorMapGrid:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != _MAP_HEADER:
        raise ValueError(f"{path}: missing header {','.join(_MAP_HEADER)}")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64).reshape(-1, 4)
    x = list(dict.fromkeys(data[:, 0]))
    y = list(dict.fromkeys(data[:, 1]))
    shape = (len(y), len(x))
    if shape[0] * shape[1] != len(data):
        raise ValueError(f"{path}: {len(data)} rows do not form a {len(y)} x {len(x)} grid")
    return ErrorMapGrid(np.array(x), np.array(y), data[:, 2].reshape(shape), data[:, 3].reshape(shape))
