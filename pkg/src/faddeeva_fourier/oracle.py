"""Extended-precision reference values for w(z) and its relatives.

Nothing here is used by the double-precision evaluators; this is test and
validation tooling.  Each reference value comes from one method and is
checked against an independent second method before it is returned:

* ``|z| <= 10``: Maclaurin series, checked by quadrature of
  w(z) = pi^(-1/2) int_0^inf exp(-t^2/4 + i z t) dt.
* ``|z| > 10``: that quadrature, checked by a deep continued fraction.
* ``Im z < 0``: w(z) = 2 exp(-z^2) - w(-z) in extended precision.

All arithmetic runs inside ``mp.workdps`` blocks; mpf values handed back
keep their full precision, but arithmetic on them at mpmath's global
default (15 digits) would not, so use :func:`rel_diff` or your own
``workdps`` block when comparing oracle values.
"""
from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from os import PathLike

import mpmath as mp

__all__ = [
    "DEFAULT_DIGITS",
    "OracleError",
    "OracleCacheMiss",
    "OracleValue",
    "OracleCache",
    "oracle_series",
    "oracle_quadrature",
    "oracle_cf",
    "oracle_w",
    "oracle_daw",
    "oracle_erf",
    "oracle_fresnel",
    "rel_diff",
    "write_cache",
    "generate_cache",
]

DEFAULT_DIGITS = 30
VALIDATED_LIMIT = 1e-25
SERIES_RADIUS = 12.0
SERIES_DISPATCH = 10.0
CACHE_VERSION = "1"

_J = mp.mpc(0, 1)


class OracleError(ArithmeticError):
    pass


class OracleCacheMiss(KeyError):
    pass


@dataclass(frozen=True)
class OracleValue:
    """Reference value with a conservative relative error bound.

    ``est_error`` bounds the error of each nonzero component relative to
    that component.
    """

    re: mp.mpf
    im: mp.mpf
    est_error: float

    @property
    def value(self) -> mp.mpc:
        return mp.mpc(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def _to_mpc(z) -> mp.mpc:
    if isinstance(z, mp.mpc):
        return z
    if isinstance(z, mp.mpf):
        return mp.mpc(z, 0)
    z = complex(z)
    return mp.mpc(mp.mpf(z.real), mp.mpf(z.imag))


def rel_diff(a, b, dps: int = 60) -> float:
    """|a - b| / |b| evaluated at ``dps`` digits (0 when both are zero)."""
    with mp.workdps(dps):
        a = a.value if isinstance(a, OracleValue) else mp.mpmathify(a)
        b = b.value if isinstance(b, OracleValue) else mp.mpmathify(b)
        d = abs(a - b)
        if d == 0:
            return 0.0
        return float(d / abs(b)) if b != 0 else math.inf


def _components(v: mp.mpc) -> list[mp.mpf]:
    return [abs(c) for c in (v.real, v.imag) if c != 0]


def _extra_digits_needed(val: mp.mpc, abs_err, digits: int) -> int:
    worst = 0.0
    for c in _components(val):
        worst = max(worst, float(mp.log10(abs_err / c)) + digits + 2) if abs_err > 0 else worst
    return int(math.ceil(worst)) if worst > 0 else 0


def _resolve(compute: Callable[[int], tuple[mp.mpc, mp.mpf]], digits: int, what: str) -> OracleValue:
    """Run ``compute(extra)`` with growing extra precision until both nonzero
    components are resolved to ``digits + 2`` significant digits."""
    extra = 0
    for _ in range(8):
        val, abs_err = compute(extra)
        need = _extra_digits_needed(val, abs_err, digits)
        if need <= 0:
            return _make_value(val, abs_err, digits)
        extra += need + 3
    raise OracleError(f"{what}: could not resolve components to {digits} digits")


def _make_value(val: mp.mpc, abs_err, digits: int) -> OracleValue:
    floor = 10.0 ** (-digits)
    est = floor
    for c in _components(val):
        est = max(est, float(abs_err / c))
    return OracleValue(val.real, val.imag, est)


def _pow10(n: int) -> mp.mpf:
    return mp.mpf(10) ** n


# --- w(z) methods -----------------------------------------------------------


def oracle_series(z, digits: int = DEFAULT_DIGITS, max_terms: int = 20000) -> OracleValue:
    """w(z) = sum_k (iz)^k / Gamma(k/2 + 1), for |z| <= 12."""
    z = _to_mpc(z)
    r2 = float(abs(z)) ** 2
    if r2 > SERIES_RADIUS**2:
        raise ValueError(f"series oracle limited to |z| <= {SERIES_RADIUS}")
    # Terms peak near exp(|z|^2); that many digits cancel.
    base = digits + 10 + int(r2 / math.log(10)) + 1

    def compute(extra: int):
        with mp.workdps(base + extra):
            iz = _J * z
            iz2 = iz * iz
            even = mp.mpf(1)
            odd = 2 * iz / mp.sqrt(mp.pi)
            total = even + odd
            biggest = max(abs(even), abs(odd))
            tol = _pow10(-(digits + 5 + extra))
            k = 1
            last = (abs(even), abs(odd))
            while True:
                k += 1
                if k > max_terms:
                    raise OracleError(f"series for w({z}) did not converge in {max_terms} terms")
                if k % 2 == 0:
                    even = even * iz2 / (k // 2)
                    term = even
                else:
                    odd = odd * iz2 / mp.mpf(k) * 2
                    term = odd
                total += term
                a = abs(term)
                biggest = max(biggest, a)
                last = (last[1], a)
                if k / 2 > r2 + 1 and max(last) < tol * abs(total):
                    break
            rho = r2 / ((k + 1) / 2)
            trunc = 2 * max(last) / (1 - rho)
            rounding = biggest * _pow10(-(base + extra)) * k
            return total, trunc + rounding

    return _resolve(compute, digits, f"series w({z})")


def oracle_quadrature(z, digits: int = DEFAULT_DIGITS, max_panels: int = 20000) -> OracleValue:
    """w(z) = pi^(-1/2) int_0^inf exp(-t^2/4) exp(-y t) exp(i x t) dt, Im z >= 0.

    For |x| > 8 the ray of integration is turned by +-pi/6 into the half of
    the t-plane where exp(i x t) decays (the integrand is entire and still
    decays along every ray between), which removes the oscillation.
    """
    z = _to_mpc(z)
    x, y = z.real, z.imag
    if y < 0:
        raise ValueError("quadrature oracle requires Im(z) >= 0")

    def compute(extra: int):
        with mp.workdps(digits + 10 + extra):
            theta = mp.mpf(0) if abs(x) <= 8 else mp.sign(x) * mp.pi / 6
            rot = mp.expjpi(theta / mp.pi)
            a = mp.cos(2 * theta) / 4
            b = x * mp.sin(theta) + y * mp.cos(theta)
            target = (digits + 8 + extra) * mp.log(10)
            S = (-b + mp.sqrt(b * b + 4 * a * target)) / (2 * a)
            tail = mp.exp(-a * S * S - b * S) / (2 * a * S + b)
            rate = abs(x * mp.cos(theta)) + abs(y * mp.sin(theta)) + S * abs(mp.sin(2 * theta)) / 2
            panels = int(mp.ceil(S * rate / (2 * mp.pi))) + 4
            if panels > max_panels:
                raise OracleError(f"quadrature for w({z}) needs {panels} panels (budget {max_panels})")

            def f(s):
                t = s * rot
                return mp.exp(-t * t / 4 + _J * z * t)

            val, err = mp.quad(f, mp.linspace(0, S, panels + 1), error=True, method="gauss-legendre")
            norm = rot / mp.sqrt(mp.pi)
            return val * norm, (abs(err) + tail) / mp.sqrt(mp.pi)

    return _resolve(compute, digits, f"quadrature w({z})")


def _cf_value(z: mp.mpc, depth: int) -> mp.mpc:
    r = mp.mpc(0)
    for k in range(depth, 0, -1):
        r = (mp.mpf(k) / 2) / (z - r)
    return (_J / mp.sqrt(mp.pi)) / (z - r)


def oracle_cf(z, digits: int = DEFAULT_DIGITS, max_depth: int = 1 << 16) -> OracleValue:
    """Laplace continued fraction, depth doubled until the value settles.

    Near the real axis a truncated fraction misses the exponentially small
    exp(-x^2) part of Re w; on the axis itself that part is added back
    exactly (w(x) = exp(-x^2) + 2i daw(x)/sqrt(pi)), and just above it the
    method refuses when that part is not negligible.
    """
    z = _to_mpc(z)
    if z.imag < 0:
        raise ValueError("continued-fraction oracle requires Im(z) >= 0")
    if abs(z) < 4:
        raise ValueError("continued-fraction oracle is for large |z|")

    def compute(extra: int):
        with mp.workdps(digits + 10 + extra):
            tol = _pow10(-(digits + 5 + extra))
            depth = 16
            prev = _cf_value(z, depth)
            while True:
                depth *= 2
                if depth > max_depth:
                    raise OracleError(f"continued fraction for w({z}) did not settle by depth {max_depth}")
                cur = _cf_value(z, depth)
                d = abs(cur - prev)
                if all(d <= tol * c for c in _components(cur)):
                    break
                prev = cur
            gauss = mp.exp(-z.real**2)
            if z.imag == 0:
                cur += gauss
            elif z.imag < 1:
                smallest = min(_components(cur))
                if gauss > _pow10(-(digits + 3)) * smallest:
                    raise OracleError(f"continued fraction cannot resolve Re w({z}) this close to the real axis")
            return cur, d + abs(cur) * _pow10(-(digits + 8 + extra))

    return _resolve(compute, digits, f"continued fraction w({z})")


def _mpmath_erfc_w(z, digits: int) -> OracleValue:
    z = _to_mpc(z)

    def compute(extra: int):
        with mp.workdps(digits + 10 + extra):
            v = mp.exp(-z * z) * mp.erfc(-_J * z)
            return v, abs(v) * _pow10(-(digits + 5 + extra))

    return _resolve(compute, digits, f"erfc w({z})")


def _check_agreement(a: OracleValue, b: OracleValue, digits: int, what: str) -> float:
    """Raise if the two values differ by more than 10x their combined error
    bounds; return the observed relative disagreement."""
    tol = 10 * (a.est_error + b.est_error)
    observed = 0.0
    with mp.workdps(digits + 20):
        scale = abs(b.value)
        for ca, cb in ((a.re, b.re), (a.im, b.im)):
            d = abs(ca - cb)
            if d == 0:
                continue
            ref = abs(cb)
            # components this small are numerically zero (e.g. Im w(iy))
            if ref <= _pow10(-digits) * scale:
                ref = scale
            rel = float(d / ref)
            observed = max(observed, rel)
            if rel > tol:
                raise OracleError(f"{what}: methods disagree (relative {rel:.3e} > {tol:.3e})")
    return observed


def _validated(primary: OracleValue, check: OracleValue, digits: int, what: str) -> OracleValue:
    observed = _check_agreement(primary, check, digits, what)
    est = max(primary.est_error, check.est_error, observed)
    if est > VALIDATED_LIMIT:
        raise OracleError(f"{what}: error bound {est:.3e} above {VALIDATED_LIMIT:.0e}")
    return OracleValue(primary.re, primary.im, est)


def _large_z_check(z: mp.mpc, digits: int) -> OracleValue:
    if abs(z) <= SERIES_RADIUS:
        return oracle_series(z, digits)
    try:
        return oracle_cf(z, digits, max_depth=1 << 12)
    except OracleError:
        # only reached for Im z within ~exp(-x^2) of the real axis
        return _mpmath_erfc_w(z, digits)


def _real_axis_asymptotic(x: mp.mpf, digits: int) -> OracleValue:
    """Cross-check for w(x), |x| > 10: daw(x) ~ sum (2k-1)!! / (2^(k+1) x^(2k+1)),
    truncated at the smallest term, which also bounds the remainder."""
    with mp.workdps(digits + 20):
        x = mp.mpf(x)
        inv2 = 1 / (2 * x * x)
        term = 1 / (2 * x)
        total = mp.mpf(0)
        k = 0
        while True:
            nxt = term * (2 * k + 1) * inv2
            if abs(nxt) >= abs(term):
                break
            total += term
            term = nxt
            k += 1
        im = 2 * total / mp.sqrt(mp.pi)
        est = abs(2 * term / mp.sqrt(mp.pi) / im) if im else abs(term)
        return OracleValue(mp.exp(-x * x), im, max(float(est), 10.0 ** (-digits)))


def _real_axis_w(x: mp.mpf, digits: int) -> OracleValue:
    """w(x) = exp(-x^2) + 2i daw(x)/sqrt(pi) on the real axis.  For large x
    the real part is far below what quadrature of w can resolve relative to
    |w|, so it is taken from its closed form."""
    daw = _daw_quadrature(x, digits + 5)
    with mp.workdps(digits + 20):
        im = 2 * daw.re / mp.sqrt(mp.pi)
        re = mp.exp(-x * x)
    return OracleValue(re, im, daw.est_error)


def oracle_w(z, digits: int = DEFAULT_DIGITS, validate: bool = True) -> OracleValue:
    """Validated reference w(z) for any finite z."""
    z = _to_mpc(z)
    if not (mp.isfinite(z.real) and mp.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {z}")
    if z.imag < 0:
        inner = oracle_w(-z, digits + 5, validate)
        with mp.workdps(digits + 25 + int(float(abs(z)) ** 2 / 2.3)):
            val = 2 * mp.exp(-z * z) - inner.value
            abs_err = inner.est_error * abs(inner.value)
        out = _make_value(val, mp.mpf(abs_err), digits)
        if out.est_error > VALIDATED_LIMIT:
            raise OracleError(f"reflection for w({z}) loses too much precision")
        return out
    what = f"w({z})"
    if z.imag == 0 and abs(z) > SERIES_DISPATCH:
        primary = _real_axis_w(z.real, digits)
        if not validate:
            return primary
        return _validated(primary, _real_axis_asymptotic(z.real, digits), digits, what)
    if abs(z) <= SERIES_DISPATCH:
        primary = oracle_series(z, digits)
        if not validate:
            return primary
        return _validated(primary, oracle_quadrature(z, digits), digits, what)
    primary = oracle_quadrature(z, digits)
    if not validate:
        return primary
    return _validated(primary, _large_z_check(z, digits), digits, what)


# --- relatives --------------------------------------------------------------


def _daw_quadrature(x: mp.mpf, digits: int) -> OracleValue:
    def compute(extra: int):
        with mp.workdps(digits + 10 + extra):
            if x == 0:
                return mp.mpc(0), mp.mpf(0)
            ax = abs(x)
            # u = x - t: the integrand exp(-u (2x - u)) decays on the scale
            # 1/x, so panels grow geometrically in units of 1/x
            scale = 1 / max(ax, mp.mpf(1))
            pts = [mp.mpf(0)]
            c = mp.mpf("0.5")
            while c * scale < ax:
                pts.append(c * scale)
                c *= 2
            pts.append(ax)
            val, err = mp.quad(lambda u: mp.exp(-u * (2 * ax - u)), pts, error=True, method="gauss-legendre")
            return mp.mpc(mp.sign(x) * val), abs(err)

    return _resolve(compute, digits, f"quadrature daw({x})")


def oracle_daw(x, digits: int = DEFAULT_DIGITS) -> OracleValue:
    """Dawson integral exp(-x^2) int_0^x exp(t^2) dt for real x, by direct
    quadrature, checked against sqrt(pi) (w(x) - exp(-x^2)) / (2i)."""
    x = mp.mpf(x)
    primary = _daw_quadrature(x, digits)
    if x == 0:
        return primary
    w = oracle_w(x, digits + 5)
    with mp.workdps(digits + 20):
        via_w = mp.sqrt(mp.pi) * (w.value - mp.exp(-x * x)) / (2 * _J)
        check = OracleValue(via_w.real, mp.mpf(0), w.est_error * float(abs(w.value) / abs(via_w)))
    return _validated(primary, check, digits, f"daw({x})")


def _erf_series(z: mp.mpc, digits: int) -> OracleValue:
    r2 = float(abs(z)) ** 2
    base = digits + 10 + int(r2 / math.log(10)) + 1

    def compute(extra: int):
        with mp.workdps(base + extra):
            tol = _pow10(-(digits + 5 + extra))
            z2 = z * z
            power = z  # (-1)^n z^(2n+1) / n!
            total = power
            biggest = abs(power)
            n = 0
            while True:
                n += 1
                power = -power * z2 / n
                term = power / (2 * n + 1)
                total += term
                biggest = max(biggest, abs(term))
                if n > r2 + 1 and abs(term) < tol * abs(total):
                    break
            scale = 2 / mp.sqrt(mp.pi)
            return total * scale, (2 * abs(term) + biggest * _pow10(-(base + extra)) * n) * scale

    return _resolve(compute, digits, f"series erf({z})")


def _line_quadrature(g: Callable[[mp.mpf], mp.mpc], z: mp.mpc, digits: int, what: str, panels: int) -> OracleValue:
    def compute(extra: int):
        with mp.workdps(digits + 10 + extra):
            val, err = mp.quad(g, mp.linspace(0, 1, panels + 1), error=True, method="gauss-legendre")
            return val * z, abs(err) * abs(z)

    return _resolve(compute, digits, what)


def oracle_erf(z, digits: int = DEFAULT_DIGITS) -> OracleValue:
    """erf(z) by its Maclaurin series, checked by quadrature of
    (2/sqrt(pi)) z int_0^1 exp(-z^2 s^2) ds."""
    z = _to_mpc(z)
    if z == 0:
        return OracleValue(mp.mpf(0), mp.mpf(0), 10.0**-digits)
    primary = _erf_series(z, digits)
    panels = 4 + int(float(abs(z)) ** 2)
    with mp.workdps(digits + 30):
        c = 2 / mp.sqrt(mp.pi)
    check = _line_quadrature(lambda s: c * mp.exp(-(z * s) ** 2), z, digits, f"quadrature erf({z})", panels)
    return _validated(primary, check, digits, f"erf({z})")


def _fresnel_series(z: mp.mpc, digits: int) -> OracleValue:
    r2 = float(abs(z)) ** 2 * math.pi / 2
    base = digits + 10 + int(r2 / math.log(10)) + 1

    def compute(extra: int):
        with mp.workdps(base + extra):
            tol = _pow10(-(digits + 5 + extra))
            q = _J * mp.pi / 2 * z * z
            power = z  # q^n z / n!
            total = power
            biggest = abs(power)
            n = 0
            while True:
                n += 1
                power = power * q / n
                term = power / (2 * n + 1)
                total += term
                biggest = max(biggest, abs(term))
                if n > r2 + 1 and abs(term) < tol * abs(total):
                    break
            return total, 2 * abs(term) + biggest * _pow10(-(base + extra)) * n

    return _resolve(compute, digits, f"series fresnel({z})")


def oracle_fresnel(z, digits: int = DEFAULT_DIGITS) -> OracleValue:
    """Fresnel integral int_0^z exp(i pi t^2 / 2) dt by quadrature along the
    segment [0, z], checked by its Maclaurin series."""
    z = _to_mpc(z)
    if z == 0:
        return OracleValue(mp.mpf(0), mp.mpf(0), 10.0**-digits)
    panels = 4 + int(float(abs(z)) ** 2)
    primary = _line_quadrature(lambda s: mp.expj(mp.pi / 2 * (z * s) ** 2), z, digits, f"quadrature fresnel({z})", panels)
    return _validated(primary, _fresnel_series(z, digits), digits, f"fresnel({z})")


# --- cache file ---------------------------------------------------------------


def _format_mp(v: mp.mpf, digits: int) -> str:
    with mp.workdps(digits + 10):
        if v == 0:
            return "0"
        return mp.nstr(v, digits, min_fixed=1, max_fixed=0)


def write_cache(
    path: str | PathLike[str],
    records: Iterable[tuple[float, float, OracleValue]],
    meta: Mapping[str, object],
    digits: int = DEFAULT_DIGITS,
) -> None:
    """Write ``x y re im est_error`` lines under a ``#`` header."""
    from . import __version__

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# faddeeva-fourier oracle cache v{CACHE_VERSION}\n")
        fh.write(f"# generator: faddeeva_fourier {__version__}\n")
        fh.write(f"# digits: {digits}\n")
        for key, value in meta.items():
            fh.write(f"# {key}: {value}\n")
        fh.write("# columns: x y re im est_error\n")
        for x, y, v in records:
            fh.write(f"{float(x)!r} {float(y)!r} {_format_mp(v.re, digits)} {_format_mp(v.im, digits)} {v.est_error:.3e}\n")


class OracleCache:
    """Read-only lookup of cached reference values keyed by exact (x, y)."""

    def __init__(self, meta: dict[str, str], values: dict[tuple[float, float], OracleValue]):
        self.meta = meta
        self._values = values

    @classmethod
    def load(cls, path: str | PathLike[str]) -> OracleCache:
        meta: dict[str, str] = {}
        values: dict[tuple[float, float], OracleValue] = {}
        with open(path, encoding="utf-8") as fh, mp.workdps(DEFAULT_DIGITS + 10):
            for lineno, line in enumerate(fh, start=1):
                if line.startswith("#"):
                    key, sep, value = line[1:].partition(":")
                    if sep:
                        meta[key.strip()] = value.strip()
                    continue
                if not line.strip():
                    continue
                parts = line.split()
                if len(parts) != 5:
                    raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
                x, y = float(parts[0]), float(parts[1])
                values[(x, y)] = OracleValue(mp.mpf(parts[2]), mp.mpf(parts[3]), float(parts[4]))
        return cls(meta, values)

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key: tuple[float, float]) -> bool:
        return (float(key[0]), float(key[1])) in self._values

    def lookup(self, x: float, y: float) -> OracleValue:
        try:
            return self._values[(float(x), float(y))]
        except KeyError:
            raise OracleCacheMiss(f"no cached reference for (x, y) = ({x!r}, {y!r})") from None

    def items(self):
        return self._values.items()


def generate_cache(
    path: str | PathLike[str],
    points: Iterable[tuple[float, float]],
    meta: Mapping[str, object],
    digits: int = DEFAULT_DIGITS,
    progress: Callable[[int], None] | None = None,
) -> None:
    records = []
    for i, (x, y) in enumerate(points):
        records.append((x, y, oracle_w(complex(x, y), digits)))
        if progress is not None:
            progress(i + 1)
    write_cache(path, records, meta, digits)
