import csv
import warnings

import numpy as np
import pytest

from hcbloch.errors import NumericalError
from hcbloch.fourier_basis import build_basis
from hcbloch.geometry import InclusionShape
from hcbloch.numerics import HermitianPencil, hermitian_generalized_eig
from hcbloch.quasistatic import (GramPair, StructuralSpectrum, apply_split, assemble_gram,
                                 export_structural_csv, pole_set, snap_spectrum, snapped_spectrum,
                                 solve_structural)


def ball_quadrature(center, radius, nr=24, nt=24, nphi=48):
    """Points and weights for a product rule on a ball (Gauss in r and cos(theta), trapezoid in phi)."""
    r, wr = np.polynomial.legendre.leggauss(nr)
    r, wr = 0.5 * radius * (r + 1), 0.5 * radius * wr
    ct, wt = np.polynomial.legendre.leggauss(nt)
    phi = 2 * np.pi * np.arange(nphi) / nphi
    R, CT, PH = np.meshgrid(r, ct, phi, indexing="ij")
    W = (wr[:, None, None] * R ** 2 * wt[None, :, None]) * (2 * np.pi / nphi)
    ST = np.sqrt(1 - CT ** 2)
    pts = np.stack([R * ST * np.cos(PH), R * ST * np.sin(PH), R * CT], axis=-1).reshape(-1, 3)
    return pts + np.asarray(center), W.ravel()


def spectrum_from(lams):
    lams = np.asarray(lams, dtype=float)
    return StructuralSpectrum(lams, np.eye(lams.size), None, None, lams.copy())


def test_k_y_is_kappa_squared_and_k_d_diagonal(sphere):
    basis = build_basis((1.0, 0.0, 0.0), 1)
    g = assemble_gram(basis, sphere)
    assert np.array_equal(np.diag(g.K_Y).real, basis.kappa_sq)
    assert np.count_nonzero(g.K_Y - np.diag(np.diagonal(g.K_Y))) == 0
    assert np.allclose(np.diagonal(g.K_D).real, basis.kappa_sq * np.pi / 48, rtol=1e-14)
    assert np.array_equal(g.K_D, g.K_D.conj().T)


def test_k_d_entries_match_ball_quadrature():
    shape = InclusionShape.sphere(0.2, (0.45, 0.55, 0.5))
    basis = build_basis((0.4, -0.9, 0.2), 1)
    g = assemble_gram(basis, shape)
    pts, w = ball_quadrature((0.45, 0.55, 0.5), 0.2)
    rng = np.random.default_rng(0)
    for _ in range(12):
        i, j = rng.integers(len(basis), size=2)
        ci = basis.evaluate_curl(np.eye(len(basis))[i], pts)
        cj = basis.evaluate_curl(np.eye(len(basis))[j], pts)
        # psi^H K_D psi = int_D |curl u|^2 puts the conjugate on the row index
        ref = np.sum(w * np.einsum("pi,pi->p", ci.conj(), cj))
        assert abs(g.K_D[i, j] - ref) <= 1e-10 * max(1.0, abs(g.K_D[i, i]))


@pytest.mark.parametrize("alpha", [(1.0, 0.0, 0.0), (0.0, 0.0, 0.0), (2.0, -0.5, 0.3)])
def test_structural_bounds_and_orthonormality(sphere, alpha):
    g = assemble_gram(build_basis(alpha, 2), sphere)
    spec = solve_structural(g)
    assert spec.lambdas.min() >= -1e-12 and spec.lambdas.max() < 1.0
    Psi = spec.Psi
    assert np.allclose(Psi.conj().T @ g.K_Y @ Psi, np.eye(spec.size), atol=1e-10)
    assert np.allclose(Psi.conj().T @ g.K_D @ Psi, np.diag(spec.lambdas), atol=1e-10)
    # trace of K_Y^-1 K_D is |D| per basis element because |kappa x e|^2 = |kappa|^2
    assert spec.lambdas.sum() == pytest.approx(spec.size * sphere.volume, rel=1e-11)


def test_snapped_spectrum_keeps_w3_values(model_a):
    raw, snap = model_a.raw, model_a.snapped
    assert np.array_equal(snap.lambdas[snap.w3], raw.lambdas[snap.w3])
    assert np.all(snap.lambdas[snap.w1] == 0.0) and np.all(snap.lambdas[snap.w2] == 1.0)
    assert snap.w1.size + snap.w2.size + snap.w3.size == snap.size
    assert snap.mu_minus == pytest.approx(0.5 - raw.lambdas[snap.w3].max())


def test_permutation_invariance(sphere, rng):
    basis = build_basis((0.5, 0.5, 0.0), 1)
    g = assemble_gram(basis, sphere)
    p = rng.permutation(len(basis))
    w_ref = solve_structural(g).lambdas
    w_perm, _ = hermitian_generalized_eig(HermitianPencil(g.K_D[np.ix_(p, p)], g.K_Y[np.ix_(p, p)]))
    assert np.allclose(w_ref, w_perm, atol=1e-12)


def test_plus_minus_alpha_give_same_spectrum(sphere):
    a = solve_structural(assemble_gram(build_basis((0.7, -0.2, 1.1), 1), sphere)).lambdas
    b = solve_structural(assemble_gram(build_basis((-0.7, 0.2, -1.1), 1), sphere)).lambdas
    assert np.allclose(a, b, atol=1e-12)


def test_snap_examples():
    s = snap_spectrum(spectrum_from([5e-4, 0.3, 0.6, 0.9995]), 1e-3)
    assert list(s.w1_idx) == [0] and list(s.w2_idx) == [3] and list(s.w3_idx) == [1, 2]
    assert list(s.lambdas) == [0.0, 0.3, 0.6, 1.0]
    assert list(s.classes()) == ["W1", "W3", "W3", "W2"]
    assert s.gaps["w1_max"] == 5e-4 and s.gaps["w2_min"] == 0.9995
    # a value exactly on the threshold belongs to W3
    with pytest.warns(RuntimeWarning):
        s = snap_spectrum(spectrum_from([0.2, 0.5]), 0.2)
    assert list(s.w3_idx) == [0, 1]
    with pytest.raises(ValueError):
        snap_spectrum(spectrum_from([0.5]), 0.3)


def test_snap_boundary_warning():
    with pytest.warns(RuntimeWarning, match="snap boundary"):
        snap_spectrum(spectrum_from([0.1 + 1e-16, 0.5]), 0.1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        snap_spectrum(spectrum_from([0.15, 0.5]), 0.1)


def test_pole_set_examples():
    spec = snapped_spectrum(spectrum_from([0.0, 0.5, 0.75, 1.0]), 1e-3)
    ps = pole_set(spec)
    # pole -(1 - lambda)/lambda: lambda = 1/2 gives -1, lambda = 3/4 gives -1/3
    assert np.allclose(ps.poles, [-1.0, -1 / 3])
    assert ps.z_star == pytest.approx(-1 / 3)
    assert list(ps.indices) == [1, 2]
    with pytest.raises(NumericalError, match="W3 is empty"):
        pole_set(snapped_spectrum(spectrum_from([0.0, 1.0]), 1e-3))


def test_unsplit_spectrum_treats_everything_as_w3():
    spec = spectrum_from([0.25, 0.5])
    assert list(spec.w3) == [0, 1] and spec.w1.size == 0
    assert spec.mu_minus == 0.0 and spec.mu_plus == 0.25
    assert not spec.is_snapped
    split = snap_spectrum(spec, 0.2)
    assert apply_split(spec, split).is_snapped


def test_gram_pair_k_h(sphere):
    g = assemble_gram(build_basis((1, 0, 0), 1), sphere)
    assert isinstance(g, GramPair)
    assert np.linalg.eigvalsh(g.K_H).min() > 0


def test_export_csv(tmp_path, model_a):
    path = tmp_path / "s.csv"
    export_structural_csv(model_a.snapped, path, {"cutoff": 2})
    text = path.read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# cutoff: 2")
    rows = list(csv.reader([ln for ln in lines if not ln.startswith("#")]))
    assert rows[0] == ["index", "lambda", "mu", "class"]
    assert len(rows) - 1 == model_a.snapped.size
    assert float(rows[1][1]) + float(rows[1][2]) == pytest.approx(0.5)
    export_structural_csv(model_a.snapped, tmp_path / "t.csv", {"cutoff": 2})
    assert (tmp_path / "t.csv").read_bytes() == path.read_bytes()
