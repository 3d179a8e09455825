"""Command-line interface: ``faddeeva-fourier <command> [options]``.

Exit status: 0 success, 1 usage error, 2 computation or validation
failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from contextlib import contextmanager
from importlib import resources
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from . import analysis as an
from . import related as rf
from .core import (
    ERR_NONE,
    ERR_NONFINITE,
    ERR_OVERFLOW,
    SQRT_PI,
    FaddeevaError,
    Region,
    RegionTag,
    _psi,
    evaluate_batch,
)
from .oracle import OracleCache, OracleCacheMiss, OracleError
from .params import CONFIG_KEYS, ApproximationParams, coefficients_for, params_from_config
from .selftest import run_suites

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

FUNCTIONS = ("w", "voigt", "erf", "erfc_scaled", "dawson", "plasma", "fresnel", "normal")

# argument at which each function consults w, and the function itself
_INNER: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "w": lambda z: z,
    "voigt": lambda z: z,
    "erf": lambda z: 1j * z,
    "erfc_scaled": lambda z: 1j * z,
    "dawson": lambda z: z,
    "plasma": lambda z: z,
    "fresnel": lambda z: 0.5 * SQRT_PI * (1 + 1j) * z,
    "normal": lambda z: 1j * z / math.sqrt(2.0),
}

APPENDIX_A_MESSAGE = "One or more imag(z) is less than 10^-6. Computation terminated."


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v) or v < 0 or v != int(v):
        raise argparse.ArgumentTypeError(f"need a non-negative integer, got {text!r}")
    return int(v)


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else format(v, ".17g")


# --- shared option groups ---------------------------------------------------------


def _param_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("approximation parameters")
    g.add_argument("--config", type=Path, help="key=value file with any of: " + ", ".join(CONFIG_KEYS))
    g.add_argument("--N", type=int, help="number of summation terms (default 16)")
    g.add_argument("--sigma", type=float, help="shift constant, >= 1 (default 1.5)")
    g.add_argument("--y-min", dest="y_min", type=float, help="narrow-band anchor height (default 1e-5)")
    g.add_argument("--y-narrow", dest="y_narrow", type=float, help="narrow-band ceiling (default 1e-6)")
    g.add_argument("--z-cf-threshold", dest="z_cf_threshold", type=float, help="continued-fraction radius (default 15)")
    return p


def _params(args) -> ApproximationParams:
    overrides = {k: getattr(args, k, None) for k in CONFIG_KEYS}
    try:
        return params_from_config(args.config, **overrides)
    except OSError as exc:
        raise _IOFailure(f"cannot read config: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


class _IOFailure(Exception):
    pass


@contextmanager
def _output(path: Path | None):
    """stdout, or a file that only appears once everything was written."""
    if path is None:
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    try:
        path.write_text(buf.getvalue(), encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}") from exc


def _data_file(name: str) -> Path:
    return Path(str(resources.files("faddeeva_fourier") / "data" / name))


def _load_cache(path: Path | None, default_name: str) -> OracleCache:
    path = path or _data_file(default_name)
    try:
        return OracleCache.load(path)
    except OSError as exc:
        raise _IOFailure(f"cannot read oracle cache {path}: {exc}") from exc


# --- eval -----------------------------------------------------------------------------


def _read_points(path: Path) -> np.ndarray:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise _IOFailure(f"{path}:{lineno}: expected 2 columns x,y, got {len(row)}")
        try:
            rows.append(complex(float(row[0]), float(row[1])))
        except ValueError:
            if lineno == 1 and not rows:
                continue  # header
            raise _IOFailure(f"{path}:{lineno}: cannot parse {','.join(row)!r} as numbers") from None
    return np.array(rows, dtype=np.complex128)


def _apply(function: str, z: np.ndarray, params, coeffs) -> np.ndarray:
    kw = dict(params=params, coeffs=coeffs)
    if function == "w":
        return evaluate_batch(z, **kw).values
    if function == "voigt":
        pair = rf.voigt(z.real, z.imag, **kw)
        return np.asarray(pair.K) + 1j * np.asarray(pair.L)
    f = {
        "erf": rf.erf_complex,
        "erfc_scaled": rf.erfc_scaled,
        "dawson": rf.dawson,
        "plasma": rf.plasma_dispersion,
        "fresnel": rf.fresnel,
        "normal": rf.normal_distribution,
    }[function]
    return np.asarray(f(z, **kw), dtype=np.complex128).reshape(-1)


def evaluate_rows(function: str, z: np.ndarray, params, coeffs) -> tuple[np.ndarray, list[str]]:
    """Values and region labels per row; failed rows get ``nan`` and an
    ``error:...`` label instead of aborting the batch."""
    inner = evaluate_batch(_INNER[function](z), params, coeffs)
    labels = [str(RegionTag.from_code(c)) if e == ERR_NONE else "" for c, e in zip(inner.codes, inner.errors)]
    values = np.full(len(z), complex(math.nan, math.nan))
    for i, e in enumerate(inner.errors):
        if e == ERR_NONFINITE or not (math.isfinite(z[i].real) and math.isfinite(z[i].imag)):
            labels[i] = "error:nonfinite"
        elif e == ERR_OVERFLOW:
            labels[i] = "error:overflow"
    if function == "voigt":
        for i in np.flatnonzero(z.imag < 0):
            if not labels[i].startswith("error"):
                labels[i] = "error:domain"
    ok = np.array([not lab.startswith("error") for lab in labels], dtype=bool)
    if ok.any():
        try:
            values[ok] = _apply(function, z[ok], params, coeffs)
        except FaddeevaError:
            for i in np.flatnonzero(ok):
                try:
                    values[i] = _apply(function, z[i : i + 1], params, coeffs)[0]
                except FaddeevaError:
                    labels[i] = "error:overflow"
    return values, labels


def _appendix_a(z: np.ndarray, coeffs, params) -> tuple[np.ndarray, list[str]]:
    if len(z) and np.any(z.imag < 1e-6):
        print(APPENDIX_A_MESSAGE, file=sys.stderr)
        return np.full(len(z), complex(math.nan, math.nan)), ["rejected"] * len(z)
    with np.errstate(all="ignore"):
        values = _psi(z + 1j * params.sigma, coeffs)
    return values, [Region.RATIONAL.label] * len(z)


def cmd_eval(args) -> int:
    params = _params(args)
    coeffs = coefficients_for(params)
    if (args.x is None) != (args.y is None):
        raise UsageError("--x and --y go together")
    if (args.x is None) == (args.input is None):
        raise UsageError("give either --x/--y or --in")
    if args.strict_appendix_a and args.function != "w":
        raise UsageError("--strict-appendix-a applies to --function w only")
    z = np.array([complex(args.x, args.y)]) if args.input is None else _read_points(args.input)
    if args.strict_appendix_a:
        values, labels = _appendix_a(z, coeffs, params)
    else:
        values, labels = evaluate_rows(args.function, z, params, coeffs)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "re", "im", "region"])
        for p, v, lab in zip(z, values, labels):
            w.writerow([_fmt(p.real), _fmt(p.imag), _fmt(v.real), _fmt(v.imag), lab])
    failed = [lab for lab in labels if lab.startswith("error") or lab == "rejected"]
    if failed:
        print(f"{len(failed)} of {len(labels)} rows failed", file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


# --- map ------------------------------------------------------------------------------


def _print_stats(label: str, stats: dict[str, float], fh: TextIO) -> None:
    print(
        f"{label}: max_dre={stats['max_dre']:.3e} max_dim={stats['max_dim']:.3e} "
        f"mean_dre={stats['mean_dre']:.3e} mean_dim={stats['mean_dim']:.3e}",
        file=fh,
    )


def cmd_map(args) -> int:
    params = _params(args)
    spec = dict(x_range=(args.x0, args.x1), y_range=(args.y0, args.y1), nx=args.nx, ny=args.ny, y_log=not args.y_linear)
    if args.nx < 1 or args.ny < 1:
        raise UsageError("--nx and --ny must be positive")
    sig = an.grid_signature(**spec)
    cache = None
    if not args.with_oracle:
        if args.cache is None and spec != an.CORE_GRID:
            print(f"error: no oracle cache for grid signature {sig!r}; pass --cache or --with-oracle", file=sys.stderr)
            return EXIT_COMPUTE
        cache = _load_cache(args.cache, "oracle_core_grid.txt")
    grid = an.sweep_domain(**spec, params=params, coeffs=coefficients_for(params), cache=cache,
                           with_oracle=args.with_oracle, chunks=args.chunks)
    with _output(args.out) as fh:
        an.write_map_rows(grid, fh)
    _print_stats("all cells", grid.stats, sys.stderr)
    if grid.y_axis[-1] > 15.0:
        _print_stats("y <= 15", grid.restrict(15.0).stats, sys.stderr)
    return EXIT_OK


# --- hitran / bench ---------------------------------------------------------------------


def _hitran_cache(args) -> OracleCache | None:
    if args.with_oracle:
        return None
    if args.cache is None and args.seed != an.DEFAULT_SEED:
        raise OracleCacheMiss(
            f"the shipped cache holds {an.hitran_signature(an.HITRAN_SUBSAMPLE, an.DEFAULT_SEED)!r}; "
            f"expected {an.hitran_signature(an.HITRAN_SUBSAMPLE, args.seed)!r} (use --with-oracle)"
        )
    return _load_cache(args.cache, "oracle_hitran.txt")


def _report(pairs, fh: TextIO | None = None) -> None:
    fh = fh or sys.stdout
    for k, v in pairs:
        print(f"{k}: {v:.6e}" if isinstance(v, float) else f"{k}: {v}", file=fh)


def cmd_hitran(args) -> int:
    params = _params(args)
    res = an.hitran_accuracy_sample(args.count, args.seed, params, coefficients_for(params),
                                    cache=_hitran_cache(args), with_oracle=args.with_oracle)
    _report([("seed", args.seed), *res.items()])
    return EXIT_OK


def cmd_bench(args) -> int:
    params = _params(args)
    coeffs = coefficients_for(params)
    if args.chunk_size < 1:
        raise UsageError("--chunk-size must be positive")
    elapsed = 0.0
    hist: dict[str, int] = {r.label: 0 for r in Region}
    core_total = core_rational = failures = 0
    for chunk in an.hitran_chunks(args.count, args.seed, args.chunk_size):
        t0 = time.perf_counter()
        try:
            res = evaluate_batch(chunk, params, coeffs)
        except MemoryError:
            print("error: out of memory; lower --chunk-size", file=sys.stderr)
            return EXIT_COMPUTE
        elapsed += time.perf_counter() - t0
        failures += int(np.count_nonzero(res.errors))
        for k, v in res.base_histogram().items():
            hist[k] = hist.get(k, 0) + v
        core = chunk.real <= 15.0
        core_total += int(core.sum())
        core_rational += int(np.count_nonzero((res.codes[core] & 15) == Region.RATIONAL))
    rows = [("count", args.count), ("seed", args.seed), ("failures", failures)]
    rows += [(f"region {k}", v) for k, v in sorted(hist.items())]
    frac = core_rational / core_total if core_total else float("nan")
    rows += [("x<=15 points", core_total), ("x<=15 rational fraction", frac)]
    if args.check and args.count:
        res = an.hitran_accuracy_sample(min(args.count, an.HITRAN_SUBSAMPLE), args.seed, params, coeffs,
                                        cache=_hitran_cache(args), with_oracle=args.with_oracle)
        rows += [(f"accuracy {k}", v) for k, v in res.items() if k.startswith(("mean", "max", "scored"))]
    rows += [("timing wall_seconds", elapsed),
             ("timing points_per_second", args.count / elapsed if elapsed > 0 else float("nan"))]
    _report(rows)
    return EXIT_COMPUTE if failures else EXIT_OK


# --- kernel / selftest ------------------------------------------------------------------


def cmd_kernel(args) -> int:
    try:
        base = ApproximationParams(N=args.N) if args.N is not None else ApproximationParams()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    t_max = args.tmax if args.tmax is not None else 2.5 / base.h_i
    try:
        samples = an.sample_cosine_kernel(args.sigma, t_max, args.nt, base)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "approx", "exact"])
        for row in samples:
            w.writerow([_fmt(v) for v in row])
    return EXIT_OK


def cmd_selftest(args) -> int:
    params = _params(args)
    results = run_suites(params, coefficients_for(params), seed=args.seed)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_COMPUTE


# --- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _param_options()
    ap = _Parser(prog="faddeeva-fourier", description="Faddeeva function via a shifted Fourier rational approximation.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="evaluate points")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--in", dest="input", type=Path, help="CSV of x,y rows (header optional)")
    p.add_argument("--out", type=Path)
    p.add_argument("--function", choices=FUNCTIONS, default="w")
    p.add_argument("--strict-appendix-a", action="store_true",
                   help="plain rational form only; reject the whole input if any Im z < 1e-6")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("map", parents=[common], help="relative-error map against the oracle")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--x1", type=float, default=15.0)
    p.add_argument("--y0", type=float, default=1e-6)
    p.add_argument("--y1", type=float, default=15.0)
    p.add_argument("--nx", type=int, default=100)
    p.add_argument("--ny", type=int, default=100)
    p.add_argument("--y-linear", action="store_true")
    p.add_argument("--cache", type=Path)
    p.add_argument("--with-oracle", action="store_true", help="compute references instead of reading a cache")
    p.add_argument("--chunks", type=int, default=1)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_map)

    for name, default, helptext in (("hitran", 100_000, "mean accuracy over the HITRAN domain"),
                                    ("bench", 30_000_000, "throughput over the HITRAN domain")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--count", type=_count, default=default)
        p.add_argument("--seed", type=int, default=an.DEFAULT_SEED)
        p.add_argument("--cache", type=Path)
        p.add_argument("--with-oracle", action="store_true")
        if name == "bench":
            p.add_argument("--chunk-size", type=_count, default=1_000_000)
            p.add_argument("--check", action="store_true", help="score the first 10^4 points against the oracle")
            p.set_defaults(handler=cmd_bench)
        else:
            p.set_defaults(handler=cmd_hitran)

    p = sub.add_parser("kernel", help="cosine-series kernel against the exact damped Gaussian")
    p.add_argument("--sigma", type=float, default=1.5, help="damping constant (any value)")
    p.add_argument("--tmax", type=float, help="default 2.5 / h_i")
    p.add_argument("--nt", type=int, default=2001)
    p.add_argument("--N", type=int)
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("selftest", parents=[common], help="identity, parity, ODE and limit suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_selftest)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"faddeeva-fourier {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OracleCacheMiss, OracleError, FaddeevaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
