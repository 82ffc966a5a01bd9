"""Contrast-dependent operators built on a structural spectrum.

With ``z = 1/k`` the solution operator of the Bloch problem is

    A(z) = Psi diag(rho(z)) Psi^H,   rho_n(z) = z / ((1 - lambda_n) + z lambda_n),

so ``rho = 1`` on W2, ``rho = z`` on W1, and A(z) has simple poles at the
structural poles. Bloch eigenvalues are the eigenvalues of
``B_k = k (K_Y - K_D) + K_D`` in the L^2-orthonormal plane-wave basis; they are
also the reciprocals of the eigenvalues of A(1/k).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT_TOLERANCES
from .errors import NumericalError, PoleError
from .numerics import general_eig


@dataclass(frozen=True, eq=False)
class OperatorFamily:
    """Operator data extracted from a (usually snapped) structural spectrum.

    ``K_Y`` is kept as its diagonal. ``poincare_sq`` is the smallest entry of
    that diagonal, i.e. |alpha|^2 for alpha != 0 and 4 pi^2 for alpha = 0.
    """

    lambdas: np.ndarray
    Psi: np.ndarray
    ky_diag: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    w3: np.ndarray
    spectrum: object = field(default=None, repr=False)
    tol: object = field(default=DEFAULT_TOLERANCES, repr=False)

    @classmethod
    def from_spectrum(cls, spec, gram=None, tol=None):
        if gram is not None:
            ky = np.real(np.diagonal(gram.K_Y)).copy()
        elif spec.basis is not None:
            ky = spec.basis.kappa_sq.copy()
        else:
            raise ValueError("need either a GramPair or a spectrum with a basis")
        return cls(np.asarray(spec.lambdas, dtype=float), spec.Psi, ky,
                   np.asarray(spec.w1, dtype=int), np.asarray(spec.w2, dtype=int),
                   np.asarray(spec.w3, dtype=int), spec, tol or DEFAULT_TOLERANCES)

    @property
    def size(self):
        return self.lambdas.size

    @property
    def poincare_sq(self):
        return float(np.min(self.ky_diag))

    @property
    def mus(self):
        return 0.5 - self.lambdas

    @property
    def mu_minus(self):
        return float(np.min(self.mus[self.w3])) if self.w3.size else None

    @cached_property
    def poles(self):
        """Structural poles -(1 - lambda) / lambda over W3, aligned with ``w3``."""
        lam = self.lambdas[self.w3]
        return -(1.0 - lam) / lam

    @property
    def z_star(self):
        return float(np.max(self.poles))

    @cached_property
    def excluded_contrasts(self):
        """The contrast set Z = {-lambda / (1 - lambda)} where B_k is singular."""
        lam = self.lambdas[self.w3]
        return -lam / (1.0 - lam)

    def rho(self, z):
        z = complex(z)
        r = np.empty(self.size, dtype=complex)
        r[self.w1] = z
        r[self.w2] = 1.0
        lam = self.lambdas[self.w3]
        gap = np.abs(z - self.poles)
        if gap.size and gap.min() < self.tol.pole:
            i = int(np.argmin(gap))
            raise PoleError(f"z = {z} is a pole of A(z) (structural index {int(self.w3[i])})",
                            index=int(self.w3[i]))
        r[self.w3] = z / ((1.0 - lam) + z * lam)
        return r

    def A0_factor(self):
        return self.Psi[:, self.w2]


def assemble_Bk_direct(gram, k):
    return k * (gram.K_Y - gram.K_D) + gram.K_D


def t_values(lambdas, k):
    """Diagonal of the spectral representation: k (1/2 + mu) + (1/2 - mu)."""
    return k * (1.0 - lambdas) + lambdas


def reconstruct_Bk_spectral(spec_or_family, k, ky_diag=None):
    src = spec_or_family
    if ky_diag is None:
        ky_diag = src.ky_diag if isinstance(src, OperatorFamily) else src.basis.kappa_sq
    t = t_values(src.lambdas, k)
    KPsi = ky_diag[:, None] * src.Psi
    return (KPsi * t[None, :]) @ KPsi.conj().T


def A_of_z(family, z):
    r = family.rho(z)
    return (family.Psi * r[None, :]) @ family.Psi.conj().T


def a_n_matrix(family, n):
    """n-th Taylor coefficient of A(z) at z = 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    c = np.zeros(family.size)
    lam = family.lambdas[family.w3]
    if n == 1:
        c[family.w1] = 1.0
    c[family.w3] = (-lam / (1.0 - lam)) ** (n - 1) / (1.0 - lam)
    return (family.Psi * c[None, :]) @ family.Psi.conj().T


@dataclass(frozen=True, eq=False)
class BlochSpectrum:
    k: complex
    alpha: tuple
    xi: np.ndarray
    route: str

    @property
    def frequencies(self):
        """omega / c = sqrt(xi) when the spectrum is real and nonnegative, else None."""
        if np.all(np.abs(self.xi.imag) == 0) and np.all(self.xi.real >= 0):
            return np.sqrt(self.xi.real)
        return None


def check_contrast(family_or_lambdas, k, tol=None):
    tol = tol or DEFAULT_TOLERANCES
    if isinstance(family_or_lambdas, OperatorFamily):
        Z = family_or_lambdas.excluded_contrasts
    else:
        lam = np.asarray(family_or_lambdas)
        lam = lam[(lam > 0) & (lam < 1)]
        Z = -lam / (1.0 - lam)
    if Z.size:
        gap = np.abs(k - Z)
        if gap.min() < tol.k_in_Z * (1.0 + abs(k)):
            raise PoleError(f"contrast k = {k} lies in the excluded set Z", index=int(np.argmin(gap)))


def _sorted_values(w):
    w = np.asarray(w)
    if np.iscomplexobj(w):
        order = np.lexsort((w.imag, w.real))
        return w[order]
    return np.sort(w)


def _is_real(k):
    return complex(k).imag == 0.0


def bloch_eigenvalues(source, k, route="pencil", alpha=None, tol=None):
    """Bloch eigenvalues xi at contrast k.

    ``source`` is a GramPair (direct assembly) or an OperatorFamily (spectral
    representation). ``route="inverse"`` instead inverts the eigenvalues of
    A(1/k) and needs a family.
    """
    tol = tol or DEFAULT_TOLERANCES
    k = complex(k)
    family = source if isinstance(source, OperatorFamily) else None
    if family is not None:
        check_contrast(family, k, tol)
        if alpha is None and family.spectrum is not None and family.spectrum.basis is not None:
            alpha = family.spectrum.basis.quasimomentum.alpha
    else:
        if alpha is None and source.basis is not None:
            alpha = source.basis.quasimomentum.alpha
    real = _is_real(k)
    if route == "pencil":
        if family is not None:
            B = reconstruct_Bk_spectral(family, k.real if real else k)
        else:
            B = assemble_Bk_direct(source, k.real if real else k)
        if real:
            xi = sla.eigvalsh(0.5 * (B + B.conj().T)).astype(complex)
        else:
            xi = general_eig(B)
    elif route == "inverse":
        if family is None:
            raise ValueError("the inverse route needs an OperatorFamily")
        if k == 0:
            raise PoleError("k = 0 has no inverse-route representation")
        A = A_of_z(family, 1.0 / k)
        if real:
            beta = sla.eigvalsh(0.5 * (A + A.conj().T)).astype(complex)
        else:
            beta = general_eig(A)
        if np.any(beta == 0):
            raise NumericalError("A(1/k) is singular")
        xi = 1.0 / beta
    else:
        raise ValueError(f"unknown route {route!r}")
    if real:
        xi = np.sort(xi.real).astype(complex)
    else:
        xi = _sorted_values(xi)
    return BlochSpectrum(k, tuple(alpha) if alpha is not None else None, xi, route)


def match_relative_discrepancy(a, b):
    """Max relative distance between two spectra after optimal one-to-one matching."""
    from scipy.optimize import linear_sum_assignment
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("spectra differ in size")
    if np.all(a.imag == 0) and np.all(b.imag == 0):
        a, b = np.sort(a.real), np.sort(b.real)
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)))
    cost = np.abs(a[:, None] - b[None, :]) / np.maximum(np.abs(b[None, :]), np.finfo(float).tiny)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def band_rows(spectra, path_params=None, bands=None):
    """Flatten BlochSpectrum records to CSV rows."""
    rows = []
    for idx, bs in enumerate(spectra):
        s = path_params[idx] if path_params is not None else idx
        xi = bs.xi if bands is None else bs.xi[:bands]
        om = bs.frequencies
        for j, x in enumerate(xi):
            w = float(om[j]) if om is not None else float("nan")
            rows.append((s, *bs.alpha, bs.k.real, bs.k.imag, j, x.real, x.imag, w))
    return rows


BAND_COLUMNS = ("path_param", "alpha1", "alpha2", "alpha3", "k_re", "k_im", "band",
                "xi_re", "xi_im", "omega_over_c")
