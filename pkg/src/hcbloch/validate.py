"""Acceptance suite: twelve numbered checks run against one configuration."""

from dataclasses import dataclass
import os
import tempfile
import time

import numpy as np

from .fourier_basis import (FieldCoefficients, RawVectorField, QuasiMomentum, build_basis,
                            curl_gram, gradient_gram, helmholtz_decompose)
from .geometry import c_l_coefficient, theta_buffered_sphere
from .operators import (A_of_z, a_n_matrix, assemble_Bk_direct, bloch_eigenvalues,
                        match_relative_discrepancy, reconstruct_Bk_spectral)
from . import perturbation as pt
from . import periodic_limit as pl
from .pipeline import build_model
from .runconfig import load_config

DEFAULT_CONFIG = {
    "geometry": {"spheres": [{"center": [0.5, 0.5, 0.5], "radius": 0.25}]},
    "cutoff": 3,
    "delta_snap": 0.2,
    "alpha": {"point": [1.0, 0.0, 0.0]},
    "contrasts": [5, 20, 100, [5, 5]],
    "series": {"group": 0, "order": 6, "quadrature": 64, "cutoff": 2},
}

RUNTIME_LIMIT = 300.0


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.name}: {self.detail} ({self.seconds:.1f}s)"

    def as_dict(self):
        return {"number": self.number, "name": self.name, "passed": bool(self.passed),
                "detail": self.detail, "seconds": round(self.seconds, 3)}


class Suite:
    """Lazily built models shared between the checks."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._models = {}
        self._series_cache = None

    def model(self, alpha, cutoff=None):
        cutoff = self.cfg.cutoff if cutoff is None else cutoff
        key = (tuple(float(a) for a in alpha), cutoff)
        if key not in self._models:
            self._models[key] = build_model(self.cfg.shape, alpha, cutoff, self.cfg.delta_snap,
                                            self.cfg.tolerances)
        return self._models[key]

    @property
    def alpha(self):
        spec = self.cfg.alpha
        a = spec.get("point") or (spec.get("list") or [[1.0, 0.0, 0.0]])[0]
        if all(x == 0 for x in a):
            return (1.0, 0.0, 0.0)
        return tuple(float(x) for x in a)

    # -- criteria -----------------------------------------------------------

    def c1_representation(self):
        m = self.model(self.alpha)
        rng = np.random.default_rng(1)
        ks = rng.uniform(-50, 50, 20) + 1j * rng.uniform(-50, 50, 20)
        worst = 0.0
        for k in ks:
            direct = assemble_Bk_direct(m.gram, k)
            spec = reconstruct_Bk_spectral(m.raw, k)
            worst = max(worst, np.linalg.norm(direct - spec) / np.linalg.norm(direct))
        return worst <= 1e-10, f"max relative Frobenius error {worst:.2e} over 20 complex k"

    def c2_bounds(self):
        worst_l, worst_m, ok = [], [], True
        for alpha in ((1.0, 0.0, 0.0), (np.pi, np.pi, np.pi), (0.0, 0.0, 0.0)):
            lam = self.model(alpha).raw.lambdas
            mu = 0.5 - lam
            ok &= bool(lam.min() >= -1e-10 and lam.max() <= 1 + 1e-10)
            ok &= bool(mu.min() >= -0.5 - 1e-10 and mu.max() <= 0.5 + 1e-10)
            worst_l.append((float(lam.min()), float(lam.max())))
        desc = ", ".join(f"[{a:.2e}, {b:.4f}]" for a, b in worst_l)
        return ok, f"lambda ranges {desc}"

    def c3_bloch(self):
        m = self.model(self.alpha)
        worst = 0.0
        for k in self.cfg.contrasts:
            a = bloch_eigenvalues(m.gram, k, route="pencil").xi
            b = bloch_eigenvalues(m.raw_family, k, route="inverse").xi
            worst = max(worst, match_relative_discrepancy(a, b))
        ks = ", ".join(str(k if k.imag else k.real) for k in self.cfg.contrasts)
        return worst <= 1e-8, f"max relative discrepancy {worst:.2e} for k in {{{ks}}}"

    def c4_taylor(self):
        fam = self.model(self.alpha).family
        r = 0.5 * abs(fam.z_star)
        M = self.cfg.tolerances.contour_points
        zs = r * np.exp(2j * np.pi * np.arange(M) / M)
        vals = [A_of_z(fam, z) for z in zs]
        worst = 0.0
        for n in range(1, 6):
            cauchy = sum(v * z ** (-n) for v, z in zip(vals, zs)) / M
            exact = a_n_matrix(fam, n)
            worst = max(worst, np.linalg.norm(exact - cauchy) / np.linalg.norm(exact))
        return worst <= 1e-8, f"max relative Frobenius error {worst:.2e} for n <= 5"

    def _series(self):
        if self._series_cache is None:
            so = self.cfg.series
            fam = self.model(self.alpha, so.cutoff).family
            group = pt.choose_contour(pt.spectrum_A0(fam), so.group, self.cfg.tolerances)
            ser = pt.series_coefficients(fam, group, so.order, so.quadrature, cross_check=False)
            zs = pt.sample_points(ser.r_star)
            evals = [pt.evaluate_group(fam, z, group, so.quadrature) for z in zs]
            ser = pt.certify(ser, fam, zs, beta_hats=[e.beta_hat for e in evals])
            self._series_cache = (fam, group, ser, zs, evals)
        return self._series_cache

    def c5_series(self):
        _, group, ser, _, _ = self._series()
        bad = [c for c in ser.certificates if not c.passed]
        ratios = pt.error_ratio_violations(ser)
        worst = max(c.observed / c.bound for c in ser.certificates)
        ok = not bad and not ratios
        return ok, (f"beta0={group.beta0:.6g} m={group.m} r*={ser.r_star:.3e}: "
                    f"{len(ser.certificates) - len(bad)}/{len(ser.certificates)} certificates, "
                    f"max observed/bound {worst:.2e}, {len(ratios)} ratio violations")

    def c6_separation(self):
        fam, group, ser, zs, evals = self._series()
        rep = pt.verify_separation(fam, group, zs, self.cfg.series.quadrature, evals)
        ok = all(s.passed for s in rep)
        idem = max(s.idempotency for s in rep)
        terr = max(s.trace_error for s in rep)
        return ok, (f"{sum(s.passed for s in rep)}/{len(rep)} samples; "
                    f"max ||P^2-P|| {idem:.1e}, max |tr P - m| {terr:.1e}")

    def c7_norm_bound(self):
        fam = self.model(self.alpha).family
        A0 = A_of_z(fam, 0.0)
        zs = -0.9 * abs(fam.z_star) * np.arange(1, 21) / 20
        worst = 0.0
        for z in zs:
            lhs = np.linalg.norm(A_of_z(fam, z) - A0, 2)
            worst = max(worst, lhs / pt.norm_bound(fam, z))
        return worst <= 1.0, f"max ||A(z)-A(0)|| / bound = {worst:.3f} at 20 real z"

    def c8_poincare(self):
        rng = np.random.default_rng(8)
        ok, worst = True, []
        for alpha, const in (((1.0, 0.0, 0.0), 1.0), ((0.0, 0.0, 0.0), 2 * np.pi)):
            b = build_basis(alpha, 2)
            C = rng.standard_normal((1000, len(b))) + 1j * rng.standard_normal((1000, len(b)))
            # damp the high modes on a random subset so some vectors sit near equality
            lowest = b.kappa_sq.min()
            damp = np.exp(-rng.uniform(0, 50, (1000, 1)) * (b.kappa_sq[None, :] / lowest - 1))
            C[::2] *= damp[::2]
            l2 = np.linalg.norm(C, axis=1)
            curl = np.sqrt(np.sum(b.kappa_sq[None, :] * np.abs(C) ** 2, axis=1))
            ok &= bool(np.all(l2 - curl / const <= 1e-12 * np.maximum(1.0, l2)))
            gram_gap = np.max(np.abs(curl_gram(b) - gradient_gram(b)))
            scale = np.max(np.abs(curl_gram(b)))
            ok &= bool(gram_gap <= 1e-12 * scale)
            worst.append(f"max ||u||/(C||curl u||) {np.max(l2 * const / curl):.6f}, "
                         f"gram gap {gram_gap / scale:.1e}")
        return ok, "; ".join(worst)

    def c9_helmholtz(self):
        rng = np.random.default_rng(9)
        worst_rec, worst_orth = 0.0, 0.0
        grid = np.array([(i, j, k) for i in range(-2, 3) for j in range(-2, 3) for k in range(-2, 3)])
        for t in range(100):
            alpha = (0.0, 0.0, 0.0) if t % 2 else tuple(rng.uniform(-np.pi, np.pi, 3))
            vals = rng.standard_normal((grid.shape[0], 3)) + 1j * rng.standard_normal((grid.shape[0], 3))
            f = RawVectorField(QuasiMomentum(alpha), grid, vals)
            parts = helmholtz_decompose(f)
            rec = parts.reconstruct()
            nrm = np.linalg.norm(vals)
            worst_rec = max(worst_rec, np.linalg.norm(rec.values - vals) / nrm)
            orth = abs(parts.gradient.l2_inner(parts.solenoidal)) / nrm ** 2
            worst_orth = max(worst_orth, orth)
        ok = worst_rec <= 1e-12 and worst_orth <= 1e-12
        return ok, f"reconstruction {worst_rec:.1e}, orthogonality {worst_orth:.1e} on 100 fields"

    def c10_periodic(self):
        m = self.model((0.0, 0.0, 0.0))
        space = pl.build_chi_div(m.snapped, offset=self.cfg.path_offset, shape=self.cfg.shape)
        modes = pl.solve_resonances(space, self.cfg.tolerances)
        roots = pl.find_roots(modes, self.cfg.tolerances)
        a0 = pt.spectrum_A0(m.family).values
        union = pl.spectrum_union_check(a0, modes, roots)
        incr = pl.lambda_increasing(modes)
        s0 = pl.spectral_function(modes, 0.0)
        nus = np.linspace(0.0, 2 * roots.poles[-1], 41)
        nus = nus[np.min(np.abs(nus[:, None] - roots.poles[None, :]), axis=1) > 1e-6]
        off = pl.cubic_offdiagonal(modes, nus)
        ok = roots.interlacing and incr and union.passed and s0 == 1.0 and off <= 1e-8
        return ok, (f"{len(roots.poles)} pole(s), roots {np.round(roots.roots, 4).tolist()}, "
                    f"interlacing {roots.interlacing}, lambda increasing {incr}, "
                    f"union distance {union.distance:.1e} (counts {union.count_a0}/{union.count_union}), "
                    f"S(0)={s0.real:g}, off-diagonal {off:.1e}")

    def c11_geometry(self):
        ok = abs(c_l_coefficient(1, 2, 1) - 5 / 7) <= 1e-12
        ok &= abs(c_l_coefficient(1, 2, 2) - 67 / 93) <= 1e-12
        rng = np.random.default_rng(11)
        for _ in range(10):
            b = rng.uniform(0.05, 0.49)
            a = rng.uniform(0.01, 0.99) * b
            th = theta_buffered_sphere(a, b)
            ok &= th.theta_inv <= th.upper_bound + 1e-12
        r1 = pt.radius_r_star((1.0, 0.0, 0.0), 0.1, -0.25)
        r2 = pt.radius_r_star((0.0, 0.0, 0.0), 0.05, -0.25)
        ok &= abs(r1 - 0.023256) <= 1e-6 and abs(r2 - 0.198949) <= 1e-6
        return bool(ok), f"C_1=5/7, C_2=67/93, 10 theta bounds, r* = {r1:.6f}, {r2:.6f}"

    def c12_determinism(self, started):
        from .cli import cmd_structural
        with tempfile.TemporaryDirectory() as tmp:
            p1, p2 = os.path.join(tmp, "a.csv"), os.path.join(tmp, "b.csv")
            cmd_structural(self.cfg, p1)
            cmd_structural(self.cfg, p2)
            with open(p1, "rb") as f1, open(p2, "rb") as f2:
                same = f1.read() == f2.read()
        elapsed = time.perf_counter() - started
        return same and elapsed <= RUNTIME_LIMIT, (f"structural CSV byte-identical: {same}; "
                                                   f"suite runtime {elapsed:.0f}s (limit {RUNTIME_LIMIT:.0f}s)")


CRITERIA = (
    (1, "spectral representation", "c1_representation"),
    (2, "structural bounds", "c2_bounds"),
    (3, "Bloch dual route", "c3_bloch"),
    (4, "Taylor coefficients", "c4_taylor"),
    (5, "series error certificates", "c5_series"),
    (6, "separation properties", "c6_separation"),
    (7, "operator-norm bound", "c7_norm_bound"),
    (8, "Poincare and curl/gradient identity", "c8_poincare"),
    (9, "Helmholtz decomposition", "c9_helmholtz"),
    (10, "periodic limit", "c10_periodic"),
    (11, "geometry and radius formulas", "c11_geometry"),
    (12, "determinism and runtime", "c12_determinism"),
)


def run_criterion(suite, number, started=None):
    num, name, meth = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        if num == 12:
            passed, detail = getattr(suite, meth)(started if started is not None else t0)
        else:
            passed, detail = getattr(suite, meth)()
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        passed, detail = False, f"{type(exc).__name__}: {exc}"
    return CriterionResult(num, name, bool(passed), detail, time.perf_counter() - t0)


def run_all(cfg=None, numbers=None, echo=None):
    cfg = cfg or load_config(DEFAULT_CONFIG)
    suite = Suite(cfg)
    started = time.perf_counter()
    results = []
    for num, _, _ in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        res = run_criterion(suite, num, started)
        results.append(res)
        if echo is not None:
            echo(res.line())
    return results
