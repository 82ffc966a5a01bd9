"""High-contrast limit at alpha = 0: resonances, effective permeability, spectral function.

Members of the constrained space are ``u = w + a`` with ``w`` in the snapped W2
and ``a`` a constant vector fixed by requiring a zero geometric average,
``a = -G w``. In W2 coordinates ``w = Psi_W2 y`` the energy Gram is the
identity and the L^2 Gram is ``Psi_W2^H Psi_W2 + (G Psi_W2)^H (G Psi_W2)``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES
from .errors import ModeError, NumericalError, PoleError
from .fourier_basis import PATH_OFFSET, check_paths, geometric_average_matrix
from .numerics import bisect


@dataclass(frozen=True, eq=False)
class ChiDivSpace:
    """Columns of ``basis_vectors`` are (plane-wave coefficients ; constant 3-vector)."""

    basis_vectors: np.ndarray
    W2: np.ndarray = field(repr=False)        # Psi restricted to W2 columns
    G: np.ndarray = field(repr=False)         # 3 x M geometric-average map
    basis: object = field(default=None, repr=False)

    @property
    def dimension(self):
        return self.basis_vectors.shape[1]

    @property
    def wave_part(self):
        return self.basis_vectors[:-3]

    @property
    def constant_part(self):
        return self.basis_vectors[-3:]

    def geometric_averages(self):
        """Geometric average of each basis vector; the constant contributes itself."""
        return self.G @ self.wave_part + self.constant_part


def build_chi_div(spec, basis=None, offset=PATH_OFFSET, shape=None):
    basis = basis or spec.basis
    if basis is None or not basis.quasimomentum.is_zero:
        raise ModeError("the constrained limit space is defined at alpha = 0 only")
    if shape is not None:
        check_paths(shape, offset)
    w2 = spec.w2
    if w2.size == 0:
        raise ModeError("W2 is empty; increase the cutoff or delta_snap")
    W = spec.Psi[:, w2]
    G = geometric_average_matrix(basis, offset)
    const = -G @ W
    return ChiDivSpace(np.vstack([W, const]), W, G, basis)


@dataclass(frozen=True, eq=False)
class ResonanceModes:
    betas: np.ndarray          # descending
    coords: np.ndarray         # W2 coordinates y_n (columns), L^2-orthonormal
    modes: np.ndarray          # (plane-wave coefficients ; constant) per column
    moments: np.ndarray        # 3 x q, m_n = int_Y u_n dx
    zero_mean: np.ndarray      # bool flags
    l2_gram: np.ndarray = field(repr=False)
    tol: object = field(default=DEFAULT_TOLERANCES, repr=False)

    @property
    def pole_modes(self):
        return np.nonzero(~self.zero_mean)[0]

    @property
    def poles(self):
        """Distinct poles 1/beta of nonzero-mean modes, ascending."""
        return _distinct(np.sort(1.0 / self.betas[~self.zero_mean]), self.tol.cluster)


def _distinct(values, rel_tol):
    out = []
    for v in values:
        if not out or abs(v - out[-1]) > rel_tol * max(abs(v), 1.0):
            out.append(float(v))
    return np.array(out)


def _clusters_desc(vals, rel_tol):
    groups, start = [], 0
    for i in range(1, vals.size + 1):
        if i == vals.size or abs(vals[i - 1] - vals[i]) > rel_tol * max(abs(vals[0]), 1e-300):
            groups.append(np.arange(start, i))
            start = i
    return groups


def solve_resonances(space, tol=None):
    tol = tol or DEFAULT_TOLERANCES
    W, G = space.W2, space.G
    C = G @ W
    L = W.conj().T @ W + C.conj().T @ C
    L = 0.5 * (L + L.conj().T)
    vals, vecs = sla.eigh(L)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    if vals[-1] <= 0:
        raise NumericalError("constrained L^2 Gram is not positive definite")
    # within degenerate clusters rotate so moments are orthogonal and zero-mean modes separate
    for idx in _clusters_desc(vals, tol.cluster):
        if idx.size < 2:
            continue
        mom = C @ vecs[:, idx]
        _, _, Vh = np.linalg.svd(mom, full_matrices=True)
        vecs[:, idx] = vecs[:, idx] @ Vh.conj().T
    Y = vecs / np.sqrt(vals)[None, :]        # y^H L y = 1
    moments = -C @ Y
    mnorm = np.linalg.norm(moments, axis=0)
    zero = mnorm < tol.zero_moment
    modes = np.vstack([W @ Y, moments])
    return ResonanceModes(vals, Y, modes, moments, zero, L, tol)


def resonance_residual(modes):
    """max_n ||L y_n - beta_n y_n||: the discrete form of (u, v) = beta <u, v>."""
    R = modes.l2_gram @ modes.coords - modes.coords * modes.betas[None, :]
    return float(np.max(np.linalg.norm(R, axis=0)))


def effective_mu(modes, nu):
    nu = float(nu)
    idx = modes.pole_modes
    mu = np.eye(3, dtype=complex)
    if nu == 0.0:
        return mu
    for n in idx:
        p = 1.0 / modes.betas[n]
        if abs(p - nu) < 1e-10 * max(1.0, abs(p)):
            raise PoleError(f"nu = {nu} collides with the pole 1/beta_{n} = {p}", index=int(n))
        m = modes.moments[:, n]
        mu = mu + nu * np.outer(m, m.conj()) / (p - nu)
    return mu


def spectral_function(modes, nu):
    mu = effective_mu(modes, nu)
    if nu == 0.0:
        return 1.0 + 0.0j
    return complex(np.linalg.det(mu))


def scalar_lambda(modes, nu, v=(1.0, 0.0, 0.0)):
    """Rayleigh quotient mu(nu) v . conj(v) / |v|^2 used in the cubic-symmetric case."""
    v = np.asarray(v, dtype=complex)
    return float(np.real(np.vdot(v, effective_mu(modes, nu) @ v) / np.vdot(v, v)))


def _branches(modes, nu):
    return np.linalg.eigvalsh(effective_mu(modes, nu))


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray             # distinct roots, ascending
    multiplicities: np.ndarray
    poles: np.ndarray
    intervals: tuple              # (lo, hi, count) per search interval
    interlacing: bool


def find_roots(modes, tol=None, rel_gap=1e-9, max_doublings=200):
    """Roots of det mu(nu) for nu > 0.

    Between consecutive poles each sorted eigenvalue branch of mu(nu) is
    nondecreasing, so each branch crossing zero is bracketed and bisected.
    Past the last pole the branches tend to the eigenvalues of
    ``I - sum m m^H``; the bracket is extended by doubling.
    """
    tol = tol or DEFAULT_TOLERANCES
    poles = modes.poles
    if poles.size == 0:
        raise ModeError("no nonzero-mean resonance: mu(nu) is the identity")
    roots, mults, intervals = [], [], []
    edges = list(poles) + [np.inf]
    for i in range(len(poles)):
        lo = poles[i] * (1 + rel_gap)
        hi_pole = edges[i + 1]
        if np.isfinite(hi_pole):
            hi = hi_pole * (1 - rel_gap)
        else:
            hi = 2.0 * poles[i]
        b_lo = _branches(modes, lo)
        b_hi = _branches(modes, hi)
        if not np.isfinite(hi_pole):
            k = 0
            limit = np.linalg.eigvalsh(np.eye(3) - modes.moments[:, modes.pole_modes]
                                       @ modes.moments[:, modes.pole_modes].conj().T)
            want = int(np.sum(b_lo < 0) - np.sum(limit < 0))
            while np.sum((b_lo < 0) & (b_hi > 0)) < want and k < max_doublings:
                hi *= 2.0
                b_hi = _branches(modes, hi)
                k += 1
        found = []
        for br in range(3):
            if b_lo[br] < 0 < b_hi[br]:
                f = (lambda nu, br=br: _branches(modes, nu)[br])
                found.append(bisect(f, lo, hi, tol.bisect))
        found.sort()
        distinct = []
        for r in found:
            if distinct and abs(r - distinct[-1][0]) <= 1e-7 * r:
                distinct[-1][1] += 1
            else:
                distinct.append([r, 1])
        for r, c in distinct:
            roots.append(r)
            mults.append(c)
        intervals.append((float(lo), float(hi), len(distinct)))
    finite = [iv for iv, e in zip(intervals, edges[1:]) if np.isfinite(e)]
    interlacing = all(c == 1 for _, _, c in finite)
    return RootSet(np.array(roots), np.array(mults, dtype=int), poles, tuple(intervals),
                   bool(interlacing))


def lambda_increasing(modes, samples=16, v=(1.0, 0.0, 0.0), rel_gap=1e-6):
    """Sampled check that the scalar lambda(nu) increases on every pole interval."""
    poles = modes.poles
    edges = [0.0] + list(poles) + [2.0 * poles[-1] if poles.size else 1.0]
    for a, b in zip(edges[:-1], edges[1:]):
        lo = a * (1 + rel_gap) if a > 0 else 0.0
        hi = b * (1 - rel_gap)
        grid = np.linspace(lo, hi, samples)
        vals = [scalar_lambda(modes, x, v) for x in grid]
        if np.any(np.diff(vals) <= 0):
            return False
    return True


def cubic_offdiagonal(modes, nus):
    """max over samples of max |mu_ij| (i != j) relative to ||mu||."""
    worst = 0.0
    for nu in nus:
        mu = effective_mu(modes, nu)
        off = mu - np.diag(np.diagonal(mu))
        worst = max(worst, float(np.max(np.abs(off)) / np.linalg.norm(mu, 2)))
    return worst


@dataclass(frozen=True)
class UnionReport:
    distance: float
    count_a0: int
    count_union: int
    counts_match: bool
    passed: bool


def _hausdorff(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return np.inf
    D = np.abs(a[:, None] - b[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def spectrum_union_check(a0_values, modes, roots=None, threshold=1e-6):
    """Compare nonzero sigma(A(0)) with {zero-mean betas} U {1/nu}."""
    zero_betas = modes.betas[modes.zero_mean]
    if modes.pole_modes.size:
        roots = roots or find_roots(modes)
        inv = 1.0 / roots.roots
        n_roots = int(roots.multiplicities.sum())
    else:
        inv = np.zeros(0)
        n_roots = 0
    union = np.concatenate([zero_betas, inv])
    a0 = np.asarray(a0_values, dtype=float)
    dist = _hausdorff(a0, union)
    n_union = int(zero_betas.size + n_roots)
    match = n_union == a0.size
    return UnionReport(dist, int(a0.size), n_union, bool(match), bool(match and dist <= threshold))


def export_dict(modes, roots, union=None):
    out = {
        "betas": modes.betas.tolist(),
        "zero_mean_flags": [bool(x) for x in modes.zero_mean],
        "poles": roots.poles.tolist(),
        "roots": roots.roots.tolist(),
        "root_multiplicities": roots.multiplicities.tolist(),
        "interlacing_pass": roots.interlacing,
    }
    if union is not None:
        out["union_check_distance"] = union.distance
        out["union_counts_match"] = union.counts_match
    return out
