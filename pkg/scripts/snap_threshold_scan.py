#!/usr/bin/env python3
"""How the W1/W2/W3 split of the structural spectrum depends on cutoff and snap threshold.

At small cutoffs the largest discrete eigenvalue stays well below 1, so a tight
threshold leaves W2 empty. This scan shows where it becomes populated.

    python scripts/snap_threshold_scan.py --radius 0.25 --cutoffs 1 2 3
"""

import argparse

import numpy as np

from hcbloch.geometry import InclusionShape
from hcbloch.pipeline import build_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=0.25)
    ap.add_argument("--cutoffs", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--deltas", type=float, nargs="+", default=[1e-3, 0.01, 0.05, 0.1, 0.2])
    ap.add_argument("--alpha", type=float, nargs=3, default=[0.0, 0.0, 0.0])
    args = ap.parse_args()

    shape = InclusionShape.sphere(args.radius)
    print(f"sphere r={args.radius}, alpha={tuple(args.alpha)}")
    print(f"{'N':>3} {'dim':>5} {'lam_min':>10} {'lam_max':>10}  " +
          "  ".join(f"d={d:<6g} W1/W2/W3" for d in args.deltas))
    for N in args.cutoffs:
        base = build_model(shape, args.alpha, N, args.deltas[0])
        lam = base.raw.lambdas
        cells = []
        for d in args.deltas:
            w1 = int(np.sum(lam < d))
            w2 = int(np.sum(lam > 1 - d))
            cells.append(f"{w1:>5d}/{w2:<3d}/{lam.size - w1 - w2:<5d}")
        print(f"{N:>3d} {lam.size:>5d} {lam.min():>10.3e} {lam.max():>10.6f}  " + "  ".join(cells))


if __name__ == "__main__":
    main()
