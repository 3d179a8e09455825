#!/usr/bin/env python3
"""Write the data behind the error maps, kernel curves and HITRAN sample as CSV.

    python3 scripts/reproduce_figures.py OUTDIR [--skip-wide]

Files written to OUTDIR:
    core_map.csv      log10 errors on the 100 x 100 grid (x 0..15, y 1e-6..15)
    wide_map.csv      40 x 40 grid up to y = 1e4 (informational)
    kernel_s0.1.csv, kernel_s1.5.csv   t, approx, exact
    hitran.txt        mean/max errors of the 10^4 scored HITRAN points

Reference values come from the oracle caches shipped with the package, so
this takes seconds rather than hours.  Plot with any tool.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from faddeeva_fourier import analysis as an
from faddeeva_fourier.oracle import OracleCache
from faddeeva_fourier.params import default_setup

WIDE_GRID = dict(x_range=(0.0, 15.0), y_range=(1e-6, 1e4), nx=40, ny=40, y_log=True)


def _cache(name: str) -> OracleCache:
    return OracleCache.load(Path(str(resources.files("faddeeva_fourier") / "data" / name)))


def _summary(label: str, stats: dict[str, float]) -> str:
    return f"{label}: " + " ".join(f"{k}={v:.3e}" for k, v in stats.items())


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--skip-wide", action="store_true")
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    params, coeffs = default_setup()

    core = an.sweep_domain(**an.CORE_GRID, params=params, coeffs=coeffs, cache=_cache("oracle_core_grid.txt"))
    an.emit_map_csv(core, args.outdir / "core_map.csv")
    print(_summary("core map", core.stats))
    for start, peak in an.decade_maxima(core, "dre"):
        print(f"  y in [{start:.0e}, {start * 10:.0e}): max log10 dre {peak:.2f}")

    if not args.skip_wide:
        wide = an.sweep_domain(**WIDE_GRID, params=params, coeffs=coeffs, cache=_cache("oracle_wide_grid.txt"))
        an.emit_map_csv(wide, args.outdir / "wide_map.csv")
        print(_summary("wide map", wide.stats))
        print(_summary("wide map, y <= 15", wide.restrict(15.0).stats))

    period = 1.0 / params.h_i
    for sigma in (0.1, 1.5):
        s = an.sample_cosine_kernel(sigma, 2.5 * period, 4001, params)
        np.savetxt(args.outdir / f"kernel_s{sigma}.csv", s, delimiter=",", header="t,approx,exact", comments="", fmt="%.17g")
        print(f"kernel sigma={sigma}: peak/flank at 1/h {an.kernel_peak_ratio(s, period, 1):.3g}, "
              f"2/h {an.kernel_peak_ratio(s, period, 2):.3g}")

    res = an.hitran_accuracy_sample(an.HITRAN_SUBSAMPLE, an.DEFAULT_SEED, params, coeffs, cache=_cache("oracle_hitran.txt"))
    text = "\n".join(f"{k}: {v}" for k, v in res.items()) + "\n"
    (args.outdir / "hitran.txt").write_text(text)
    print(_summary("hitran", {k: v for k, v in res.items() if k.startswith(("mean", "max"))}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
