"""Power series of eigenvalue groups of A(z) about z = 0, with certified radii.

A group is isolated by a circle Gamma around an eigenvalue beta0 of A(0). Its
spectral projection and weighted mean are contour integrals of the resolvent
R(zeta, z) = (A(z) - zeta)^{-1}, evaluated with the trapezoid rule.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES
from .errors import ConfigError, NumericalError, SelectionError
from .fourier_basis import as_quasimomentum
from .numerics import contour_nodes, solve
from .operators import OperatorFamily, A_of_z, a_n_matrix

log = logging.getLogger(__name__)

SAMPLE_RADII = (0.25, 0.5, 0.75, 0.9)
SAMPLE_ANGLES = 8


@dataclass(frozen=True)
class A0Spectrum:
    clusters: tuple          # ((beta, multiplicity), ...) for nonzero beta, descending
    zero_multiplicity: int
    values: np.ndarray       # nonzero eigenvalues, descending, with repetition

    def __len__(self):
        return len(self.clusters)


def _cluster(values, rel_tol):
    """Group descending values whose consecutive gaps are below rel_tol * scale."""
    out = []
    if values.size == 0:
        return out
    scale = max(abs(values[0]), 1e-300)
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or abs(values[i - 1] - values[i]) > rel_tol * scale:
            chunk = values[start:i]
            out.append((float(np.mean(chunk)), int(chunk.size)))
            start = i
    return out


def spectrum_A0(family, tol=None):
    """Nonzero eigenvalues of A(0) = Psi_W2 Psi_W2^H, via the small Gram Psi_W2^H Psi_W2."""
    tol = tol or family.tol
    F = family.A0_factor()
    n = family.size
    if F.shape[1] == 0:
        return A0Spectrum((), n, np.zeros(0))
    vals = sla.eigvalsh(F.conj().T @ F)[::-1]
    if vals[-1] <= 0:
        raise NumericalError("A(0) restricted to W2 is not positive definite")
    return A0Spectrum(tuple(_cluster(vals, tol.cluster)), n - vals.size, vals)


@dataclass(frozen=True)
class EigenvalueGroup:
    index: int
    beta0: float
    m: int
    center: float
    radius: float
    d: float


def choose_contour(spec0, j=0, tol=None):
    tol = tol or DEFAULT_TOLERANCES
    if not (0 <= j < len(spec0.clusters)):
        raise SelectionError(
            f"group index {j} out of range: A(0) has {len(spec0.clusters)} nonzero eigenvalue groups")
    beta, m = spec0.clusters[j]
    others = [b for i, (b, _) in enumerate(spec0.clusters) if i != j] + [0.0]
    gap = min(abs(beta - b) for b in others)
    if gap < tol.min_gap:
        raise NumericalError(f"eigenvalue groups unresolved: gap {gap:.3e} below {tol.min_gap:.1e}")
    radius = min(0.5 * gap, 0.5 * beta)
    return EigenvalueGroup(j, beta, m, beta, radius, radius)


def resolvent(A, zeta, check=True, tol=1e-10):
    """(A - zeta)^{-1} by LU solve against the identity."""
    n = A.shape[0]
    shifted = A - zeta * np.eye(n)
    R = solve(shifted, np.eye(n, dtype=complex))
    if check:
        res = np.linalg.norm(shifted @ R - np.eye(n))
        if res > tol * max(1.0, np.linalg.norm(shifted) * np.linalg.norm(R) * 1e-4):
            raise NumericalError(f"resolvent residual {res:.2e} too large at zeta = {zeta}")
    return R


def _nodes(group, M):
    if M < 16:
        raise ConfigError("contour quadrature needs M >= 16")
    return contour_nodes(group.center, group.radius, M)


@dataclass(frozen=True, eq=False)
class GroupEvaluation:
    z: complex
    beta_hat: complex
    P: np.ndarray = field(repr=False)
    trace: complex = 0.0
    idempotency: float = 0.0


def evaluate_group(family, z, group, M=None, want_projection=True):
    """Weighted mean and (optionally) spectral projection of the group at z.

    Both integrals share the resolvent samples, so asking for both costs one LU
    per node.
    """
    M = M or family.tol.contour_points
    nodes = _nodes(group, M)
    A = A_of_z(family, z)
    n = A.shape[0]
    P = np.zeros((n, n), dtype=complex) if want_projection else None
    acc = 0.0 + 0.0j
    ident = np.eye(n, dtype=complex)
    for zeta, w in nodes:
        try:
            R = solve(A - zeta * ident, ident)
        except NumericalError as exc:
            raise NumericalError(f"contour meets the spectrum of A({z}) at zeta = {zeta}") from exc
        tr = np.trace(R)
        acc += w * (zeta - group.beta0) * tr
        if want_projection:
            P += w * R
    beta_hat = group.beta0 + acc / group.m
    if not want_projection:
        return GroupEvaluation(complex(z), complex(beta_hat), None)
    idem = float(np.linalg.norm(P @ P - P))
    return GroupEvaluation(complex(z), complex(beta_hat), P, complex(np.trace(P)), idem)


def projection_P(family, z, group, M=None, check=True):
    ev = evaluate_group(family, z, group, M)
    if check:
        tol = family.tol
        if ev.idempotency > tol.idempotency:
            raise NumericalError(
                f"projection not idempotent (||P^2 - P|| = {ev.idempotency:.2e}); try a larger M")
        if abs(ev.trace - group.m) > tol.trace:
            raise NumericalError(f"projection trace {ev.trace} differs from multiplicity {group.m}")
    return ev.P


def weighted_mean(family, z, group, M=None):
    return evaluate_group(family, z, group, M, want_projection=False).beta_hat


def radius_r_star(alpha, d, mu_minus):
    """Certified radius of convergence of the group series.

    ``alpha`` may be a quasimomentum (the Poincare constant is |alpha|^2, or
    4 pi^2 at alpha = 0) or directly that constant as a positive float.
    """
    if isinstance(alpha, (int, float, np.floating)) and not isinstance(alpha, bool):
        c = float(alpha)
        if not c > 0:
            raise ValueError("Poincare constant must be positive")
    else:
        qm = as_quasimomentum(alpha)
        c = 4 * np.pi ** 2 if qm.is_zero else qm.norm ** 2
    if not d > 0:
        raise ValueError("d must be positive")
    if not (-0.5 < mu_minus < 0):
        raise ValueError(f"mu_minus = {mu_minus} outside (-1/2, 0): the radius formula needs "
                         "the lowest interior resonance strictly below zero")
    zs = abs((mu_minus + 0.5) / (mu_minus - 0.5))
    r = c * d * zs / (1.0 / (0.5 - mu_minus) + c * d)
    assert r < zs
    return r


def error_bound(p, z, d, r_star):
    az = abs(z)
    if az >= r_star:
        raise ValueError(f"|z| = {az} is not inside the certified radius {r_star}")
    return d * az ** (p + 1) / (r_star ** p * (r_star - az))


def norm_bound(family, z):
    """Upper bound on ||A(z) - A(0)|| for real z in (z*, 0)."""
    zs, mu = family.z_star, family.mu_minus
    az = abs(z)
    return az / (family.poincare_sq * (-az - zs) * (0.5 - mu))


@dataclass(frozen=True)
class Certificate:
    z: complex
    p: int
    bound: float
    observed: float
    passed: bool


@dataclass(frozen=True, eq=False)
class SeriesExpansion:
    group: EigenvalueGroup
    coeffs: np.ndarray
    r_star: float
    z_star: float
    cauchy_coeffs: np.ndarray = None
    cauchy_radius: float = None
    certificates: tuple = ()

    def partial_sum(self, z, p):
        n = np.arange(p + 1)
        return complex(np.sum(self.coeffs[:p + 1] * complex(z) ** n))

    def to_dict(self):
        return {
            "beta0": self.group.beta0,
            "m": self.group.m,
            "d": self.group.d,
            "z_star": self.z_star,
            "r_star": self.r_star,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "certificates": [
                {"z": [c.z.real, c.z.imag], "p": c.p, "bound": c.bound,
                 "observed": c.observed, "pass": c.passed}
                for c in self.certificates
            ],
        }


def composition_coefficients(family, group, p, M=None):
    """beta_1..beta_p from the composition sum over A_k R(zeta, 0) products."""
    M = M or family.tol.contour_points
    nodes = _nodes(group, M)
    A0 = A_of_z(family, 0.0)
    An = [None] + [a_n_matrix(family, k) for k in range(1, p + 1)]
    n = A0.shape[0]
    ident = np.eye(n, dtype=complex)
    total = np.zeros(p + 1, dtype=complex)
    for zeta, w in nodes:
        R = solve(A0 - zeta * ident, ident)
        X = [None] + [An[k] @ R for k in range(1, p + 1)]
        # S[q][j] = sum over compositions of q into j parts of X_k1 ... X_kj
        S = [dict() for _ in range(p + 1)]
        for q in range(1, p + 1):
            S[q][1] = X[q]
            for j in range(2, q + 1):
                acc = None
                for k in range(1, q - j + 2):
                    term = X[k] @ S[q - k][j - 1]
                    acc = term if acc is None else acc + term
                S[q][j] = acc
        for q in range(1, p + 1):
            s = 0.0 + 0.0j
            for j, mat in S[q].items():
                s += (-1) ** j / j * np.trace(mat)
            total[q] += w * s
    # With R = (A - zeta)^{-1} the composition sum carries an overall minus sign
    # relative to the projection formula; the Cauchy cross-check pins it down.
    coeffs = -total / group.m
    coeffs[0] = group.beta0
    return coeffs


def cauchy_coefficients(family, group, p, radius, Mz=32, M=None):
    """beta_n = (1/2 pi i) oint beta_hat(z) z^{-n-1} dz on |z| = radius."""
    zs = radius * np.exp(2j * np.pi * np.arange(Mz) / Mz)
    vals = np.array([weighted_mean(family, z, group, M) for z in zs])
    n = np.arange(p + 1)
    return np.array([np.mean(vals * zs ** (-k)) for k in n])


def cross_check_discrepancy(series):
    """Composition-sum vs Cauchy coefficients, compared as terms of the series at |z| = rho.

    Dividing by rho^n amplifies the rounding noise in the Cauchy samples, so the
    raw relative error of high-order coefficients is meaningless when rho is
    small. Weighting each difference by rho^n and normalising by the largest
    term gives a scale-free measure that stays near machine precision.
    """
    if series.cauchy_coeffs is None:
        raise ValueError("series has no Cauchy cross-check")
    rho = series.cauchy_radius
    n = np.arange(series.coeffs.size)
    diff = np.abs(series.coeffs - series.cauchy_coeffs) * rho ** n
    # beta_0 is set, not computed; compare the perturbative terms only
    scale = np.max(np.abs(series.coeffs[1:]) * rho ** n[1:]) if n.size > 1 else 1.0
    return float(np.max(diff[1:]) / scale) if n.size > 1 else 0.0


def sample_points(r_star, radii=SAMPLE_RADII, angles=SAMPLE_ANGLES):
    th = 2 * np.pi * np.arange(angles) / angles
    return [rf * r_star * np.exp(1j * t) for rf in radii for t in th]


def series_coefficients(family, group, p, M=None, cross_check=True, Mz=32):
    if p > 10:
        raise ConfigError("series order p is capped at 10")
    if p < 0:
        raise ConfigError("series order must be nonnegative")
    mu_minus = family.mu_minus
    r = radius_r_star(family.poincare_sq, group.d, mu_minus)
    coeffs = composition_coefficients(family, group, p, M) if p > 0 else np.array([group.beta0],
                                                                                   dtype=complex)
    cc = None
    if cross_check and p > 0:
        cc = cauchy_coefficients(family, group, p, 0.5 * r, Mz, M)
    return SeriesExpansion(group, coeffs, r, family.z_star, cc, 0.5 * r if cc is not None else None)


def certify(series, family, z_samples=None, M=None, beta_hats=None):
    """Observed truncation error against the analytic bound at each (z, p).

    ``beta_hats`` may carry weighted means already computed at the samples.
    """
    group, r = series.group, series.r_star
    if z_samples is None:
        z_samples = sample_points(r)
    p = series.coeffs.size - 1
    certs = []
    for i, z in enumerate(z_samples):
        bh = beta_hats[i] if beta_hats is not None else weighted_mean(family, z, group, M)
        for q in range(p + 1):
            obs = abs(bh - series.partial_sum(z, q))
            b = error_bound(q, z, group.d, r)
            certs.append(Certificate(complex(z), q, b, obs, bool(obs <= b)))
    return SeriesExpansion(series.group, series.coeffs, series.r_star, series.z_star,
                           series.cauchy_coeffs, series.cauchy_radius, tuple(certs))


def error_ratio_violations(series, floor=None, slack=0.05):
    """(z, p) pairs where err_{p+1}/err_p exceeds |z|/r* + slack.

    Ratios are only meaningful while err_p sits above the rounding floor of the
    weighted mean; pairs below ``floor`` are skipped.
    """
    if floor is None:
        floor = 1e3 * np.finfo(float).eps * abs(series.group.beta0)
    by_z = {}
    for c in series.certificates:
        by_z.setdefault(c.z, {})[c.p] = c.observed
    bad = []
    for z, errs in by_z.items():
        for q in sorted(errs):
            if q + 1 in errs and errs[q] > floor and errs[q + 1] > floor:
                ratio = errs[q + 1] / errs[q]
                if ratio > abs(z) / series.r_star + slack:
                    bad.append((z, q, ratio))
    return bad


@dataclass(frozen=True)
class SeparationSample:
    z: complex
    in_resolvent: bool
    min_distance: float
    inside_count: int
    trace_error: float
    idempotency: float
    passed: bool


def verify_separation(family, group, z_samples, M=None, evaluations=None):
    """Check the contour stays in the resolvent set and the projection keeps rank m.

    The resolvent-set test uses a direct eigensolve of A(z), independent of the
    contour quadrature that produces P(z).
    """
    tol = family.tol
    out = []
    for i, z in enumerate(z_samples):
        A = A_of_z(family, z)
        eig = sla.eigvals(A)
        dist = np.abs(np.abs(eig - group.center) - group.radius)
        inside = int(np.sum(np.abs(eig - group.center) < group.radius))
        min_dist = float(dist.min())
        ok_res = min_dist > 0
        ev = evaluations[i] if evaluations is not None else evaluate_group(family, z, group, M)
        terr = abs(ev.trace - group.m)
        passed = ok_res and inside == group.m and terr <= tol.trace and ev.idempotency <= tol.idempotency
        out.append(SeparationSample(complex(z), ok_res, min_dist, inside, float(terr),
                                    ev.idempotency, bool(passed)))
    return out


def neumann_factor(family, z, group, M=None):
    """max over contour nodes of ||(A(z) - A(0)) R(zeta, 0)||_2."""
    M = M or family.tol.contour_points
    nodes = _nodes(group, M)
    A0 = A_of_z(family, 0.0)
    D = A_of_z(family, z) - A0
    ident = np.eye(A0.shape[0], dtype=complex)
    worst = 0.0
    for zeta, _ in nodes:
        R = solve(A0 - zeta * ident, ident)
        worst = max(worst, float(np.linalg.norm(D @ R, 2)))
    return worst


def build_synthetic_family(mu_list, w1_dim, w2_dim, seed=0, weights=None, tol=None):
    """Exact finite model: prescribed W3 resonances and exact W1/W2 blocks.

    ``Psi = diag(weights)^{-1/2} U`` with U a seeded Haar unitary, so that
    ``Psi^H K_Y Psi = I`` for ``K_Y = diag(weights)`` (identity by default).
    """
    mu = np.asarray(mu_list, dtype=float).ravel()
    if np.any(mu <= -0.5) or np.any(mu >= 0.5):
        raise ConfigError("synthetic resonances must lie strictly inside (-1/2, 1/2)")
    if w1_dim < 0 or w2_dim < 0:
        raise ConfigError("subspace dimensions must be nonnegative")
    n = int(w1_dim) + int(w2_dim) + mu.size
    if n == 0:
        raise ConfigError("empty synthetic family")
    lam = np.concatenate([np.zeros(int(w1_dim)), np.sort(0.5 - mu), np.ones(int(w2_dim))])
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, Rr = np.linalg.qr(Z)
    Q = Q * (np.diagonal(Rr) / np.abs(np.diagonal(Rr)))[None, :]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0):
        raise ConfigError("weights must be a positive vector matching the model size")
    Psi = Q / np.sqrt(w)[:, None]
    w1 = np.arange(int(w1_dim))
    w3 = np.arange(int(w1_dim), int(w1_dim) + mu.size)
    w2 = np.arange(int(w1_dim) + mu.size, n)
    return OperatorFamily(lam, Psi, w, w1, w2, w3, None, tol or DEFAULT_TOLERANCES)
