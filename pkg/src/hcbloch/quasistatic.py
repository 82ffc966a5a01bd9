"""Quasi-static resonance problem: Gram assembly, structural spectrum, snapping.

The generalized problem ``K_D psi = lambda K_Y psi`` is the Galerkin form of
``lambda <u, w> = int_D curl u . conj(curl w)``; mu = 1/2 - lambda.
"""

from dataclasses import dataclass, field
import logging
import warnings

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import NumericalError
from .fourier_basis import PlaneWaveBasis
from .geometry import indicator_fourier
from .numerics import HermitianPencil, hermitian_generalized_eig

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GramPair:
    K_Y: np.ndarray
    K_D: np.ndarray
    basis: PlaneWaveBasis = field(default=None, repr=False)

    @property
    def K_H(self):
        return self.K_Y - self.K_D


def assemble_gram(basis, shape):
    """Full-cell and inclusion curl-curl Gram matrices.

    ``K_D[m, m'] = (kappa_m x e_m).(kappa_m' x e_m') * chi_D(n_m - n_m')`` where
    chi_D is the indicator transform with kernel exp(-2 pi i m.x).
    """
    ns = basis.ns
    dn = ns[:, None, :] - ns[None, :, :]
    span = 2 * basis.cutoff
    width = 2 * span + 1
    grid = np.arange(-span, span + 1)
    table_ns = np.stack(np.meshgrid(grid, grid, grid, indexing="ij"), axis=-1).reshape(-1, 3)
    table = indicator_fourier(shape, table_ns)
    flat = ((dn[..., 0] + span) * width + (dn[..., 1] + span)) * width + (dn[..., 2] + span)
    chi = table[flat]
    c = basis.curl_vectors
    K_D = (c @ c.T) * chi
    # mirror the lower triangle so K_D is Hermitian to the bit
    K_D = np.tril(K_D) + np.tril(K_D, -1).conj().T
    K_Y = np.diag(basis.kappa_sq).astype(complex)
    return GramPair(K_Y, K_D, basis)


@dataclass(frozen=True, eq=False)
class SubspaceSplit:
    w1_idx: np.ndarray
    w2_idx: np.ndarray
    w3_idx: np.ndarray
    snapped: bool
    delta_snap: float
    lambdas: np.ndarray            # snapped copy: exactly 0 on W1, 1 on W2
    gaps: dict = field(default_factory=dict)

    def classes(self):
        out = np.empty(self.lambdas.size, dtype=object)
        out[self.w1_idx] = "W1"
        out[self.w2_idx] = "W2"
        out[self.w3_idx] = "W3"
        return out


@dataclass(frozen=True, eq=False)
class StructuralSpectrum:
    lambdas: np.ndarray
    Psi: np.ndarray
    basis: PlaneWaveBasis = field(default=None, repr=False)
    split: SubspaceSplit = None
    raw_lambdas: np.ndarray = None

    @property
    def mus(self):
        return 0.5 - self.lambdas

    @property
    def size(self):
        return self.lambdas.size

    @property
    def w1(self):
        return self.split.w1_idx if self.split else np.array([], dtype=int)

    @property
    def w2(self):
        return self.split.w2_idx if self.split else np.array([], dtype=int)

    @property
    def w3(self):
        return self.split.w3_idx if self.split else np.arange(self.size)

    @property
    def mu_minus(self):
        w3 = self.w3
        return float(np.min(self.mus[w3])) if w3.size else None

    @property
    def mu_plus(self):
        w3 = self.w3
        return float(np.max(self.mus[w3])) if w3.size else None

    @property
    def is_snapped(self):
        return self.split is not None and self.split.snapped


def solve_structural(gram, tol=None):
    tol = tol or DEFAULT_TOLERANCES
    lam, Psi = hermitian_generalized_eig(HermitianPencil(gram.K_D, gram.K_Y), tol.eig_residual)
    return StructuralSpectrum(lam, Psi, gram.basis, None, lam.copy())


def snap_spectrum(spec, delta_snap=None):
    """Classify eigenvalues near 0 / 1 as W1 / W2 and snap them exactly."""
    if delta_snap is None:
        delta_snap = DEFAULT_TOLERANCES.delta_snap
    if not (0 < delta_snap < 0.25):
        raise ValueError("delta_snap must lie in (0, 1/4)")
    lam = spec.raw_lambdas if spec.raw_lambdas is not None else spec.lambdas
    w1 = np.nonzero(lam < delta_snap)[0]
    w2 = np.nonzero(lam > 1.0 - delta_snap)[0]
    w3 = np.nonzero((lam >= delta_snap) & (lam <= 1.0 - delta_snap))[0]
    snapped = lam.copy()
    snapped[w1] = 0.0
    snapped[w2] = 1.0
    eps10 = 10 * np.finfo(float).eps
    near = w3[(np.abs(lam[w3] - delta_snap) < eps10) | (np.abs(lam[w3] - (1 - delta_snap)) < eps10)]
    if near.size:
        warnings.warn(f"W3 eigenvalues {near.tolist()} sit on a snap boundary", RuntimeWarning)
    gaps = {}
    if w1.size:
        gaps["w1_max"] = float(lam[w1].max())
    if w2.size:
        gaps["w2_min"] = float(lam[w2].min())
    if w3.size:
        gaps["w3_min"] = float(lam[w3].min())
        gaps["w3_max"] = float(lam[w3].max())
    return SubspaceSplit(w1, w2, w3, True, float(delta_snap), snapped, gaps)


def apply_split(spec, split):
    raw = spec.raw_lambdas if spec.raw_lambdas is not None else spec.lambdas
    return StructuralSpectrum(split.lambdas, spec.Psi, spec.basis, split, raw)


def snapped_spectrum(spec, delta_snap=None):
    return apply_split(spec, snap_spectrum(spec, delta_snap))


@dataclass(frozen=True)
class PoleSet:
    poles: np.ndarray        # sorted ascending, all negative
    z_star: float            # max(poles)
    indices: np.ndarray      # structural index of each pole


def pole_set(spec):
    w3 = spec.w3
    if w3.size == 0:
        raise NumericalError("no interior resonances: W3 is empty")
    mu = spec.mus[w3]
    poles = (mu + 0.5) / (mu - 0.5)
    order = np.argsort(poles, kind="stable")
    return PoleSet(poles[order], float(poles[order][-1]), w3[order])


def export_structural_csv(spec, path, header=None):
    from .io import write_csv
    classes = spec.split.classes() if spec.split else np.array(["W3"] * spec.size, dtype=object)
    rows = [(i, float(l), float(0.5 - l), str(c)) for i, (l, c) in enumerate(zip(spec.lambdas, classes))]
    write_csv(path, ("index", "lambda", "mu", "class"), rows, header)
