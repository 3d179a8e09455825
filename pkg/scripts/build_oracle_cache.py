#!/usr/bin/env python3
"""Generate the oracle cache files shipped in ``faddeeva_fourier/data``.

    python3 scripts/build_oracle_cache.py core hitran cf calib wide

Each target is written atomically; an existing file is skipped unless
``--force`` is given.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from faddeeva_fourier import analysis as an
from faddeeva_fourier.oracle import generate_cache

DATA = Path(__file__).resolve().parents[1] / "src" / "faddeeva_fourier" / "data"

WIDE_GRID = dict(x_range=(0.0, 15.0), y_range=(1e-6, 1e4), nx=40, ny=40, y_log=True)


def _grid_target(spec):
    x, y = an.grid_axes(spec["x_range"], spec["y_range"], spec["nx"], spec["ny"], spec["y_log"])
    pts = [(xi, yi) for yi in y for xi in x]
    sig = an.grid_signature(spec["x_range"], spec["y_range"], spec["nx"], spec["ny"], spec["y_log"])
    return pts, sig


def _sample_target(z, sig):
    return [(float(p.real), float(p.imag)) for p in z], sig


def targets():
    sub = an.HITRAN_SUBSAMPLE
    return {
        "core": ("oracle_core_grid.txt", lambda: _grid_target(an.CORE_GRID)),
        "wide": ("oracle_wide_grid.txt", lambda: _grid_target(WIDE_GRID)),
        "hitran": (
            "oracle_hitran.txt",
            lambda: _sample_target(an.hitran_points(sub, an.DEFAULT_SEED), an.hitran_signature(sub, an.DEFAULT_SEED)),
        ),
        "cf": ("oracle_cf.txt", lambda: _sample_target(an.cf_points(200, an.DEFAULT_SEED), an.cf_signature(200, an.DEFAULT_SEED))),
        "calib": ("oracle_cf_calibration.txt", lambda: _sample_target(an.cf_points(400, 1), an.cf_signature(400, 1))),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("names", nargs="+", choices=sorted(targets()))
    ap.add_argument("--force", action="store_true")
    ap.add_argument("--digits", type=int, default=30)
    args = ap.parse_args(argv)
    DATA.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        fname, build = targets()[name]
        path = DATA / fname
        if path.exists() and not args.force:
            print(f"{name}: {path} exists, skipping")
            continue
        pts, sig = build()
        t0 = time.perf_counter()
        step = max(1, len(pts) // 20)

        def progress(i, n=len(pts)):
            if i % step == 0 or i == n:
                print(f"{name}: {i}/{n}  {time.perf_counter() - t0:.0f}s", flush=True)

        tmp = path.with_suffix(".tmp")
        generate_cache(tmp, pts, {"signature": sig, "points": len(pts)}, args.digits, progress)
        os.replace(tmp, path)
        print(f"{name}: wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
