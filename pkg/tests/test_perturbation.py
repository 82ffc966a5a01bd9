import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hcbloch.errors import ConfigError, NumericalError, SelectionError
from hcbloch.operators import A_of_z
from hcbloch import perturbation as pt


@pytest.fixture(scope="module")
def weighted():
    """Nondegenerate synthetic family: random K_Y weights split the W2 block."""
    w = np.random.default_rng(7).uniform(1.0, 4.0, 8)
    return pt.build_synthetic_family([-0.3, -0.1, 0.2], 2, 3, seed=11, weights=w)


def dense_A0_eigs(fam):
    return np.sort(np.linalg.eigvalsh(A_of_z(fam, 0.0)))[::-1]


def group_mean_by_eigensolve(fam, z, group):
    ev = np.linalg.eigvals(A_of_z(fam, z))
    inside = ev[np.abs(ev - group.center) < group.radius]
    assert inside.size == group.m
    return inside.mean()


def test_synthetic_family_contract(weighted):
    fam = weighted
    K = np.diag(fam.ky_diag)
    assert np.allclose(fam.Psi.conj().T @ K @ fam.Psi, np.eye(fam.size), atol=1e-12)
    assert list(fam.w1) == [0, 1] and list(fam.w3) == [2, 3, 4] and list(fam.w2) == [5, 6, 7]
    assert np.allclose(np.sort(fam.mus[fam.w3]), [-0.3, -0.1, 0.2])
    assert fam.mu_minus == pytest.approx(-0.3)
    with pytest.raises(ConfigError):
        pt.build_synthetic_family([0.5], 0, 0)
    with pytest.raises(ConfigError):
        pt.build_synthetic_family([0.1], 0, 1, weights=[1.0])
    with pytest.raises(ConfigError):
        pt.build_synthetic_family([], 0, 0)


def test_spectrum_A0_matches_dense_eigensolve(weighted):
    spec = pt.spectrum_A0(weighted)
    dense = dense_A0_eigs(weighted)
    assert np.allclose(spec.values, dense[:3], rtol=1e-12)
    assert spec.zero_multiplicity == 5
    assert np.allclose(dense[3:], 0, atol=1e-12)
    assert len(spec) == 3 and all(m == 1 for _, m in spec.clusters)


def test_spectrum_A0_unit_weights_is_projection():
    fam = pt.build_synthetic_family([-0.2], 1, 3)
    spec = pt.spectrum_A0(fam)
    assert spec.clusters == ((pytest.approx(1.0), 3),)
    empty = pt.spectrum_A0(pt.build_synthetic_family([-0.2], 1, 0))
    assert len(empty) == 0 and empty.zero_multiplicity == 2


def test_choose_contour_geometry_and_errors(weighted):
    spec = pt.spectrum_A0(weighted)
    b = [c[0] for c in spec.clusters]
    g = pt.choose_contour(spec, 1)
    assert g.beta0 == b[1]
    assert g.radius == pytest.approx(min(0.5 * abs(b[1] - b[0]), 0.5 * abs(b[1] - b[2]), 0.5 * b[1]))
    assert g.d == g.radius
    with pytest.raises(SelectionError):
        pt.choose_contour(spec, 3)
    with pytest.raises(SelectionError):
        pt.choose_contour(spec, -1)
    close = pt.A0Spectrum(((1.0, 1), (1.0 - 1e-12, 1)), 0, np.array([1.0, 1.0 - 1e-12]))
    with pytest.raises(NumericalError, match="unresolved"):
        pt.choose_contour(close, 0)


def test_resolvent_residual(weighted, rng):
    A = A_of_z(weighted, 0.01 + 0.002j)
    R = pt.resolvent(A, 0.3 + 0.1j)
    assert np.allclose((A - (0.3 + 0.1j) * np.eye(A.shape[0])) @ R, np.eye(A.shape[0]), atol=1e-12)


def test_projection_at_zero_matches_eigenvectors(weighted):
    spec = pt.spectrum_A0(weighted)
    g = pt.choose_contour(spec, 0)
    P = pt.projection_P(weighted, 0.0, g, 64)
    w, V = np.linalg.eigh(A_of_z(weighted, 0.0))
    v = V[:, np.argmax(w)]
    assert np.allclose(P, np.outer(v, v.conj()), atol=1e-12)


@pytest.mark.parametrize("j", [0, 1, 2])
def test_weighted_mean_matches_eigensolve(weighted, j):
    g = pt.choose_contour(pt.spectrum_A0(weighted), j)
    r = pt.radius_r_star(weighted.poincare_sq, g.d, weighted.mu_minus)
    for z in (0.5 * r, 0.9 * r * np.exp(2.0j), -0.7 * r):
        ev = pt.evaluate_group(weighted, z, g, 64)
        assert abs(ev.beta_hat - group_mean_by_eigensolve(weighted, z, g)) < 1e-12
        assert abs(ev.trace - 1) < 1e-10 and ev.idempotency < 1e-10


def test_degenerate_group_mean():
    fam = pt.build_synthetic_family([-0.25, 0.1], 1, 3, seed=4)
    g = pt.choose_contour(pt.spectrum_A0(fam), 0)
    assert g.m == 3 and g.beta0 == pytest.approx(1.0)
    z = 0.4 * pt.radius_r_star(fam.poincare_sq, g.d, fam.mu_minus) * np.exp(0.3j)
    assert abs(pt.weighted_mean(fam, z, g, 64) - group_mean_by_eigensolve(fam, z, g)) < 1e-12


def exact_two_by_two_coeffs(mu, seed, p):
    """Taylor coefficients of the W2 eigenvalue of a 2x2 family from the quadratic formula."""
    fam = pt.build_synthetic_family([mu], 0, 1, seed=seed, weights=[1.0, 2.5])
    lam = 0.5 - mu
    Psi = fam.Psi

    def beta(z):
        rho = z / ((1 - lam) + z * lam)
        A = rho * np.outer(Psi[:, 0], Psi[:, 0].conj()) + np.outer(Psi[:, 1], Psi[:, 1].conj())
        tr, det = np.trace(A), np.linalg.det(A)
        disc = np.sqrt(tr * tr - 4 * det)
        return (tr + disc) / 2     # branch continuing the nonzero eigenvalue of A(0)

    rho_c = 1e-3
    zs = rho_c * np.exp(2j * np.pi * np.arange(64) / 64)
    vals = np.array([beta(z) for z in zs])
    return fam, np.array([np.mean(vals * zs ** (-n)) for n in range(p + 1)]), rho_c


@pytest.mark.parametrize("mu,seed", [(-0.3, 0), (-0.05, 1), (0.2, 2)])
def test_composition_coefficients_two_by_two_oracle(mu, seed):
    fam, exact, rho_c = exact_two_by_two_coeffs(mu, seed, 5)
    g = pt.choose_contour(pt.spectrum_A0(fam), 0)
    coeffs = pt.composition_coefficients(fam, g, 5, 64)
    scaled = np.abs(coeffs - exact) * rho_c ** np.arange(6)
    assert scaled.max() <= 1e-13 * np.max(np.abs(exact) * rho_c ** np.arange(6))


def test_series_cross_check_and_certificates(weighted):
    g = pt.choose_contour(pt.spectrum_A0(weighted), 0)
    ser = pt.series_coefficients(weighted, g, 6, 64)
    assert pt.cross_check_discrepancy(ser) < 1e-10
    ser = pt.certify(ser, weighted, M=64)
    assert len(ser.certificates) == 32 * 7
    assert all(c.passed for c in ser.certificates)
    assert pt.error_ratio_violations(ser) == []
    c0 = ser.certificates[0]
    assert c0.p == 0
    assert c0.observed == pytest.approx(abs(pt.weighted_mean(weighted, c0.z, g, 64) - g.beta0), rel=1e-12)
    doc = ser.to_dict()
    assert set(doc) == {"beta0", "m", "d", "z_star", "r_star", "coeffs", "certificates"}
    assert len(doc["coeffs"]) == 7


def test_series_on_bloch_model(model_a):
    fam = model_a.family
    g = pt.choose_contour(pt.spectrum_A0(fam), 0)
    ser = pt.series_coefficients(fam, g, 4, 64)
    assert pt.cross_check_discrepancy(ser) < 1e-10
    zs = pt.sample_points(ser.r_star, radii=(0.5,), angles=4)
    ser = pt.certify(ser, fam, zs, 64)
    assert all(c.passed for c in ser.certificates)


def test_series_order_limits(weighted):
    g = pt.choose_contour(pt.spectrum_A0(weighted), 0)
    with pytest.raises(ConfigError):
        pt.series_coefficients(weighted, g, 11)
    with pytest.raises(ConfigError):
        pt.series_coefficients(weighted, g, -1)
    with pytest.raises(ConfigError, match="M >= 16"):
        pt.weighted_mean(weighted, 0.0, g, 8)
    s0 = pt.series_coefficients(weighted, g, 0)
    assert list(s0.coeffs) == [g.beta0] and s0.cauchy_coeffs is None
    with pytest.raises(ValueError):
        pt.cross_check_discrepancy(s0)


def test_radius_examples():
    # c = 1, d = 1, mu- = -1/4: |z*| = 1/3 and r* = (1/3) / (4/3 + 1) = 1/7
    assert pt.radius_r_star(1.0, 1.0, -0.25) == pytest.approx(1 / 7)
    assert pt.radius_r_star((1.0, 0.0, 0.0), 1.0, -0.25) == pytest.approx(1 / 7)
    c = 4 * np.pi ** 2
    expected = c * (1 / 3) / (4 / 3 + c)
    assert pt.radius_r_star((0.0, 0.0, 0.0), 1.0, -0.25) == pytest.approx(expected)
    with pytest.raises(ValueError, match="mu_minus"):
        pt.radius_r_star(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        pt.radius_r_star(1.0, 0.0, -0.25)


@given(st.floats(0.01, 50.0), st.floats(1e-4, 10.0), st.floats(-0.49, -0.01))
def test_radius_inside_pole_and_monotone_in_d(c, d, mu):
    r = pt.radius_r_star(c, d, mu)
    zs = abs((mu + 0.5) / (mu - 0.5))
    assert 0 < r < zs
    assert pt.radius_r_star(c, 2 * d, mu) >= r


def test_error_bound_examples():
    assert pt.error_bound(0, 0.5, 1.0, 1.0) == pytest.approx(1.0)
    assert pt.error_bound(2, 0.5, 1.0, 1.0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        pt.error_bound(1, 1.0, 1.0, 1.0)


def test_separation_on_samples(weighted):
    g = pt.choose_contour(pt.spectrum_A0(weighted), 0)
    r = pt.radius_r_star(weighted.poincare_sq, g.d, weighted.mu_minus)
    samples = pt.verify_separation(weighted, g, pt.sample_points(r, angles=4), 64)
    assert all(s.passed for s in samples)
    assert all(s.inside_count == 1 for s in samples)


def test_norm_bound_and_neumann_factor(model_a):
    fam = model_a.family
    A0 = A_of_z(fam, 0.0)
    for s in (0.1, 0.5, 0.9):
        z = s * fam.z_star
        observed = np.linalg.norm(A_of_z(fam, z) - A0, 2)
        assert observed <= pt.norm_bound(fam, z) * (1 + 1e-12)
    g = pt.choose_contour(pt.spectrum_A0(fam), 0)
    r = pt.radius_r_star(fam.poincare_sq, g.d, fam.mu_minus)
    assert pt.neumann_factor(fam, 0.5 * r, g, 32) < 1


@settings(max_examples=10)
@given(st.integers(0, 1000))
def test_weighted_mean_is_analytic_in_z(seed):
    # the mean is real on the real axis and conjugate-symmetric off it
    fam = pt.build_synthetic_family([-0.2, 0.15], 1, 2, seed=seed,
                                    weights=np.random.default_rng(seed).uniform(1, 3, 5))
    spec = pt.spectrum_A0(fam)
    g = pt.choose_contour(spec, 0)
    r = pt.radius_r_star(fam.poincare_sq, g.d, fam.mu_minus)
    z = 0.5 * r * np.exp(0.9j)
    a, b = pt.weighted_mean(fam, z, g, 64), pt.weighted_mean(fam, np.conj(z), g, 64)
    assert abs(a - np.conj(b)) < 1e-13
    assert abs(pt.weighted_mean(fam, 0.5 * r, g, 64).imag) < 1e-13
