"""Command-line entry point: ``hcbloch <subcommand> --config run.json``.

Exit codes: 0 ok, 2 configuration error, 3 group selection error, 4 mode
error (e.g. alpha != 0 where alpha = 0 is required), 5 numerical failure.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import json
import logging
import sys

import numpy as np

from .errors import ConfigError, HCBlochError, ModeError, PoleError
from .geometry import (BufferedGeometry, mu_minus_from_theta, theta_buffered_sphere,
                       z_star as z_star_formula)
from .io import write_csv, write_json
from .operators import BAND_COLUMNS, bloch_eigenvalues, check_contrast
from . import perturbation as pt
from . import periodic_limit as pl
from .pipeline import build_model
from .quasistatic import export_structural_csv
from .runconfig import load_config, provenance, read_config

log = logging.getLogger("hcbloch")


def _single_alpha(cfg):
    pts = cfg.alpha_points()
    if len(pts) != 1:
        raise ConfigError("this subcommand needs a single alpha point")
    return pts[0][1]


def _out(cfg, out, key, default):
    return out or cfg.outputs.get(key) or default


def cmd_structural(cfg, out=None):
    alpha = _single_alpha(cfg)
    model = build_model(cfg.shape, alpha.alpha, cfg.cutoff, cfg.delta_snap, cfg.tolerances)
    header = dict(provenance(cfg))
    header.update({"alpha": list(alpha.alpha), "cutoff": cfg.cutoff,
                   "geometry_sha": cfg.shape.digest(), "delta_snap": cfg.delta_snap,
                   "split_gaps": model.snapped.split.gaps})
    path = _out(cfg, out, "structural", "structural.csv")
    export_structural_csv(model.snapped, path, header)
    return {"path": path, "rows": model.snapped.size}


def _band_point(cfg, s, qm, flag):
    model = build_model(cfg.shape, qm.alpha, cfg.cutoff, cfg.delta_snap, cfg.tolerances)
    rows = []
    for k in cfg.contrasts:
        row_flag = flag
        try:
            check_contrast(model.raw.lambdas, k, cfg.tolerances)
        except PoleError:
            row_flag = (flag + ";" if flag else "") + "k_in_Z"
        bs = bloch_eigenvalues(model.gram, k, route="pencil")
        xi = bs.xi[:cfg.bands]
        om = bs.frequencies
        for j, x in enumerate(xi):
            w = float(om[j]) if om is not None else float("nan")
            rows.append((s, *qm.alpha, k.real, k.imag, j, x.real, x.imag, w, row_flag))
    return rows


def cmd_bands(cfg, out=None, threads=1):
    pts = cfg.alpha_points()
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        chunks = list(pool.map(lambda p: _band_point(cfg, *p), pts))
    rows = [r for chunk in chunks for r in chunk]
    header = dict(provenance(cfg))
    header.update({"cutoff": cfg.cutoff, "geometry_sha": cfg.shape.digest(), "bands": cfg.bands})
    path = _out(cfg, out, "bands", "bands.csv")
    write_csv(path, BAND_COLUMNS + ("flag",), rows, header)
    return {"path": path, "rows": len(rows)}


def cmd_series(cfg, out=None):
    alpha = _single_alpha(cfg)
    so = cfg.series
    model = build_model(cfg.shape, alpha.alpha, so.cutoff, cfg.delta_snap, cfg.tolerances)
    fam = model.family
    spec0 = pt.spectrum_A0(fam, cfg.tolerances)
    group = pt.choose_contour(spec0, so.group, cfg.tolerances)
    ser = pt.series_coefficients(fam, group, so.order, so.quadrature, cross_check=False)
    ser = pt.certify(ser, fam, pt.sample_points(ser.r_star), so.quadrature)
    doc = ser.to_dict()
    doc.update({"alpha": list(alpha.alpha), "cutoff": so.cutoff, "mu_minus": fam.mu_minus,
                "provenance": provenance(cfg)})
    path = _out(cfg, out, "series", "series.json")
    write_json(path, doc)
    return doc


def cmd_effective_mu(cfg, out=None):
    alpha = _single_alpha(cfg)
    if not alpha.is_zero:
        raise ModeError("effective-mu requires alpha = (0, 0, 0)")
    model = build_model(cfg.shape, alpha.alpha, cfg.cutoff, cfg.delta_snap, cfg.tolerances)
    space = pl.build_chi_div(model.snapped, offset=cfg.path_offset, shape=cfg.shape)
    modes = pl.solve_resonances(space, cfg.tolerances)
    roots = pl.find_roots(modes, cfg.tolerances)
    union = pl.spectrum_union_check(pt.spectrum_A0(model.family).values, modes, roots)
    doc = pl.export_dict(modes, roots, union)
    if not (cfg.shape.is_cubic_symmetric() and cfg.path_offset == 0.0):
        # one root per pole interval is a statement about the isotropic tensor only
        doc["interlacing_pass"] = None
    doc["cubic_symmetric"] = cfg.shape.is_cubic_symmetric()
    doc["provenance"] = provenance(cfg)
    path = _out(cfg, out, "effective_mu", "effective_mu.json")
    write_json(path, doc)
    return doc


def cmd_radius(cfg, out=None):
    spec = cfg.radius or {}
    doc = {"provenance": provenance(cfg)}
    if "buffered" in spec:
        b = spec["buffered"]
        try:
            geom = BufferedGeometry(float(b["a"]), float(b["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad buffered geometry {b!r}") from exc
        th = theta_buffered_sphere(geom)
        mu_b = mu_minus_from_theta(th.theta)
        doc["buffered"] = {"a": geom.a, "b": geom.b, "theta": th.theta, "theta_inv": th.theta_inv,
                           "l_at_max": th.l_at_max, "upper_bound": th.upper_bound,
                           "mu_minus": mu_b, "z_plus": z_star_formula(mu_b) if mu_b > -0.5 else None}
    if "d" in spec and "mu_minus" in spec:
        alpha = spec.get("alpha", list(_single_alpha(cfg).alpha))
        try:
            r = pt.radius_r_star(tuple(alpha), float(spec["d"]), float(spec["mu_minus"]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        doc.update({"alpha": list(alpha), "d": float(spec["d"]), "mu_minus": float(spec["mu_minus"]),
                    "z_star": z_star_formula(float(spec["mu_minus"])), "r_star": r, "source": "formula"})
    elif "buffered" not in spec:
        alpha = _single_alpha(cfg)
        model = build_model(cfg.shape, alpha.alpha, cfg.series.cutoff, cfg.delta_snap, cfg.tolerances)
        fam = model.family
        group = pt.choose_contour(pt.spectrum_A0(fam, cfg.tolerances), cfg.series.group, cfg.tolerances)
        r = pt.radius_r_star(fam.poincare_sq, group.d, fam.mu_minus)
        doc.update({"alpha": list(alpha.alpha), "d": group.d, "mu_minus": fam.mu_minus,
                    "z_star": fam.z_star, "r_star": r, "beta0": group.beta0, "m": group.m,
                    "source": "model"})
    path = _out(cfg, out, "radius", "radius.json")
    write_json(path, doc)
    return doc


def cmd_validate(cfg=None, as_json=False, stream=None):
    from .validate import run_all
    stream = stream or sys.stdout
    echo = None if as_json else (lambda line: print(line, file=stream, flush=True))
    results = run_all(cfg, echo=echo)
    ok = all(r.passed for r in results)
    if as_json:
        stream.write(json.dumps({"passed": ok, "criteria": [r.as_dict() for r in results]},
                                indent=2, sort_keys=True) + "\n")
    else:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed", file=stream)
    return 0 if ok else 1


COMMANDS = {
    "structural": cmd_structural,
    "bands": cmd_bands,
    "series": cmd_series,
    "effective-mu": cmd_effective_mu,
    "radius": cmd_radius,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="hcbloch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["validate"]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output path (overrides the config)")
        p.add_argument("--json", action="store_true", help="machine-readable stdout")
        p.add_argument("--threads", type=int, default=1, help="worker threads for band sweeps")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "validate":
            cfg = read_config(args.config) if args.config else None
            return cmd_validate(cfg, args.json)
        if not args.config:
            raise ConfigError(f"{args.command} needs --config")
        cfg = read_config(args.config)
        if args.command == "bands":
            res = cmd_bands(cfg, args.out, args.threads)
        else:
            res = COMMANDS[args.command](cfg, args.out)
        if args.json:
            print(json.dumps(_summary(res), sort_keys=True, default=str))
        return 0
    except HCBlochError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 5


def _summary(res):
    if isinstance(res, dict):
        return {k: v for k, v in res.items() if k != "certificates"}
    return res


if __name__ == "__main__":
    sys.exit(main())
