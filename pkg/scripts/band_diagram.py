#!/usr/bin/env python3
"""Band diagram along a Brillouin-zone path, as CSV plus a short text summary.

Thin wrapper around ``hcbloch bands``; it also prints, per contrast, the
lowest band's range and the gap (if any) between bands 2 and 3 on the path.

    python scripts/band_diagram.py scripts/configs/sphere_bands.json --out bands.csv
"""

import argparse
import csv

import numpy as np

from hcbloch.cli import cmd_bands
from hcbloch.runconfig import read_config


def summarize(path):
    lines = [ln for ln in open(path).read().splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    by_k = {}
    for r in rows:
        if "gamma-exact" in r["flag"]:
            continue
        key = (float(r["k_re"]), float(r["k_im"]))
        by_k.setdefault(key, {}).setdefault(int(r["band"]), []).append(float(r["omega_over_c"]))
    for (kr, ki), bands in sorted(by_k.items()):
        b = {j: np.array(v) for j, v in bands.items()}
        label = f"k={kr:g}" + (f"{ki:+g}i" if ki else "")
        if np.isnan(b[0]).any():
            print(f"{label}: complex spectrum, see xi columns")
            continue
        msg = f"{label}: band 0 in [{b[0].min():.4f}, {b[0].max():.4f}]"
        if 1 in b and 2 in b:
            gap = b[2].min() - b[1].max()
            msg += f", gap(1,2) = {gap:.4f}" if gap > 0 else ", bands 1 and 2 overlap"
        print(msg)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("config")
    ap.add_argument("--out", default=None)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    cfg = read_config(args.config)
    res = cmd_bands(cfg, args.out, args.threads)
    print(f"wrote {res['rows']} rows to {res['path']}")
    summarize(res["path"])


if __name__ == "__main__":
    main()
