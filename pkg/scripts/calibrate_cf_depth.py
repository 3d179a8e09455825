#!/usr/bin/env python3
"""Find the smallest continued-fraction depth meeting the accuracy target.

Uses the calibration cache (400 points, |z| in [15, 1e6], Im z >= 0, half
of them within 1 of the real axis) and reports, per depth, the worst
componentwise relative error of the dispatched fraction.  The chosen value
is stored as ``core.CF_DEPTH``.

    python3 scripts/calibrate_cf_depth.py [--target 1e-14]
"""
from __future__ import annotations

import argparse
import cmath
import math
import sys
from pathlib import Path

import numpy as np

from faddeeva_fourier import analysis as an
from faddeeva_fourier.core import _cf_branch
from faddeeva_fourier.oracle import OracleCache, oracle_w
from faddeeva_fourier.params import ApproximationParams

DATA = Path(__file__).resolve().parents[1] / "src" / "faddeeva_fourier" / "data"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--cache", default=DATA / "oracle_cf_calibration.txt", type=Path)
    ap.add_argument("--target", type=float, default=1e-14)
    ap.add_argument("--max-depth", type=int, default=40)
    args = ap.parse_args(argv)

    cache = OracleCache.load(args.cache)
    keys = list(cache.items())
    # plus the threshold circle itself, computed on the spot
    ring = [cmath.rect(15.0, t) for t in (0.0, 1e-9, 1e-7, 1e-4, 1e-2, 0.3, math.pi / 4, 1.2, math.pi / 2)]
    ring = [complex(abs(p.real), max(p.imag, 0.0)) for p in ring]
    z = np.array([complex(x, y) for (x, y), _ in keys] + ring)
    ref = an.reference_arrays([v for _, v in keys] + [oracle_w(p) for p in ring])
    # the dispatcher folds to the first quadrant and conjugates back
    q = np.abs(z.real) + 1j * z.imag
    flip = z.real < 0
    y_narrow = ApproximationParams().y_narrow

    chosen = None
    for depth in range(1, args.max_depth + 1):
        w = _cf_branch(q, depth, y_narrow)
        w = np.where(flip, np.conj(w), w)
        dre, dim = an.relative_errors(w, ref)
        worst = float(np.nanmax(np.maximum(dre, dim)))
        i = int(np.nanargmax(np.maximum(dre, dim)))
        print(f"depth {depth:3d}: worst {worst:.3e} at z = {z[i]:.6g}")
        if chosen is None and worst <= args.target:
            chosen = depth
            break
    if chosen is None:
        print(f"no depth up to {args.max_depth} reaches {args.target:g}")
        return 1
    print(f"smallest depth meeting {args.target:g}: {chosen}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
