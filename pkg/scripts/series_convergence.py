#!/usr/bin/env python3
"""Truncation error of the eigenvalue-group series against its a-priori bound.

For one sample direction the script prints |beta_hat(z) - partial sum| for each
order p next to the certified bound, at a few fractions of the radius r*.

    python scripts/series_convergence.py --cutoff 2 --order 6
"""

import argparse

import numpy as np

from hcbloch.geometry import InclusionShape
from hcbloch import perturbation as pt
from hcbloch.pipeline import build_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=0.25)
    ap.add_argument("--cutoff", type=int, default=2)
    ap.add_argument("--delta", type=float, default=0.2)
    ap.add_argument("--group", type=int, default=0)
    ap.add_argument("--order", type=int, default=6)
    ap.add_argument("--quadrature", type=int, default=64)
    ap.add_argument("--angle", type=float, default=0.4, help="arg(z) of the samples")
    args = ap.parse_args()

    model = build_model(InclusionShape.sphere(args.radius), (1.0, 0.0, 0.0), args.cutoff, args.delta)
    fam = model.family
    group = pt.choose_contour(pt.spectrum_A0(fam), args.group)
    ser = pt.series_coefficients(fam, group, args.order, args.quadrature)
    print(f"beta0={group.beta0:.6g} m={group.m} d={group.d:.3e} mu-={fam.mu_minus:.4f} "
          f"z*={fam.z_star:.4f} r*={ser.r_star:.4e}")
    print(f"composition vs Cauchy (scaled): {pt.cross_check_discrepancy(ser):.2e}")
    for n, c in enumerate(ser.coeffs):
        print(f"  beta_{n} = {c.real:+.10e} {c.imag:+.2e}i")

    for frac in (0.25, 0.5, 0.75, 0.9):
        z = frac * ser.r_star * np.exp(1j * args.angle)
        bh = pt.weighted_mean(fam, z, group, args.quadrature)
        print(f"\n|z| = {frac:.2f} r*")
        print(f"{'p':>3} {'observed':>12} {'bound':>12} {'obs/bound':>10}")
        for p in range(args.order + 1):
            obs = abs(bh - ser.partial_sum(z, p))
            b = pt.error_bound(p, z, group.d, ser.r_star)
            print(f"{p:>3d} {obs:>12.3e} {b:>12.3e} {obs / b:>10.3e}")


if __name__ == "__main__":
    main()
