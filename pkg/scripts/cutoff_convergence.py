#!/usr/bin/env python3
"""Structural extremes and low Bloch eigenvalues as the plane-wave cutoff grows.

Useful for judging how far the discrete mu- and the first bands are from
their resolved values at a given cutoff.

    python scripts/cutoff_convergence.py --cutoffs 1 2 3 --contrast 20
"""

import argparse
import time

import numpy as np

from hcbloch.geometry import InclusionShape
from hcbloch.operators import bloch_eigenvalues
from hcbloch.pipeline import build_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=0.25)
    ap.add_argument("--cutoffs", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--alpha", type=float, nargs=3, default=[1.0, 0.0, 0.0])
    ap.add_argument("--contrast", type=float, default=20.0)
    ap.add_argument("--bands", type=int, default=4)
    args = ap.parse_args()

    shape = InclusionShape.sphere(args.radius)
    for N in args.cutoffs:
        t0 = time.perf_counter()
        model = build_model(shape, args.alpha, N, 0.2)
        lam = model.raw.lambdas
        xi = bloch_eigenvalues(model.gram, args.contrast).xi.real[:args.bands]
        print(f"N={N} dim={lam.size:4d} mu-(raw)={0.5 - lam.max():+.5f} mu+(raw)={0.5 - lam.min():+.5f} "
              f"omega={np.array2string(np.sqrt(xi), precision=5)} ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
