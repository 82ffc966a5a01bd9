#!/usr/bin/env python3
"""Tabulate the limit permeability tensor mu(nu) at alpha = 0 and list its poles and roots.

    python scripts/effective_permeability.py scripts/configs/sphere_limit.json --samples 12
"""

import argparse

import numpy as np

from hcbloch import periodic_limit as pl
from hcbloch.perturbation import spectrum_A0
from hcbloch.pipeline import build_model
from hcbloch.runconfig import read_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--samples", type=int, default=12)
    args = ap.parse_args()
    cfg = read_config(args.config)
    alpha = cfg.alpha_points()[0][1]
    model = build_model(cfg.shape, alpha.alpha, cfg.cutoff, cfg.delta_snap, cfg.tolerances)
    modes = pl.solve_resonances(pl.build_chi_div(model.snapped, offset=cfg.path_offset, shape=cfg.shape))
    roots = pl.find_roots(modes)
    union = pl.spectrum_union_check(spectrum_A0(model.family).values, modes, roots)

    print(f"W2 dimension {modes.betas.size}, nonzero-mean modes {modes.pole_modes.size}")
    print("poles 1/beta:", np.array2string(roots.poles, precision=4))
    print("roots of det mu:", np.array2string(roots.roots, precision=4),
          "multiplicities", roots.multiplicities.tolist())
    print(f"union check distance {union.distance:.2e}, counts {union.count_union}/{union.count_a0}")

    top = 1.5 * roots.roots.max() if roots.roots.size else 2 * roots.poles.max()
    grid = np.linspace(0.0, top, args.samples + 1)[1:]
    print(f"\n{'nu':>10} {'eig(mu) (ascending)':>40} {'det':>12}")
    for nu in grid:
        if np.min(np.abs(nu - roots.poles)) < 1e-6 * nu:
            continue
        ev = np.linalg.eigvalsh(pl.effective_mu(modes, nu))
        print(f"{nu:>10.3f} {np.array2string(ev, precision=4):>40} {pl.spectral_function(modes, nu).real:>12.4e}")


if __name__ == "__main__":
    main()
