"""Dense linear-algebra kernels and scalar utilities.

Thin wrappers over LAPACK (via scipy) that enforce the contracts the rest of
the package relies on: B-orthonormal generalized eigenvectors, residual checks,
pole-safe linear solves and trapezoid nodes on circular contours.
"""

from dataclasses import dataclass
import warnings

import numpy as np
import scipy.linalg as sla
import scipy.optimize

from .config import DEFAULT_TOLERANCES
from .errors import NumericalError


@dataclass(frozen=True)
class HermitianPencil:
    """Pair (A, B) with A Hermitian and B Hermitian positive definite."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A)
        B = np.asarray(self.B)
        if A.ndim != 2 or A.shape != B.shape or A.shape[0] != A.shape[1]:
            raise ValueError(f"pencil matrices must be square and equal-shaped, got {A.shape} and {B.shape}")
        tol = DEFAULT_TOLERANCES.hermitian
        for name, M in (("A", A), ("B", B)):
            scale = max(np.linalg.norm(M), 1.0)
            if np.linalg.norm(M - M.conj().T) > tol * scale:
                raise ValueError(f"pencil matrix {name} is not Hermitian")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)


def _cholesky_lower(B):
    potrf = sla.lapack.get_lapack_funcs("potrf", (B,))
    L, info = potrf(B, lower=True, clean=True)
    if info > 0:
        raise NumericalError(f"B is not positive definite: Cholesky pivot {info} failed")
    if info < 0:
        raise NumericalError(f"invalid argument {-info} passed to potrf")
    return L


def hermitian_generalized_eig(pencil, residual_tol=None):
    """Solve A v = w B v.

    Returns ascending real eigenvalues and a matrix V with V^H B V = I.
    The problem is reduced to standard form with the Cholesky factor of B.
    """
    if residual_tol is None:
        residual_tol = DEFAULT_TOLERANCES.eig_residual
    A, B = pencil.A, pencil.B
    if B.ndim == 2 and np.count_nonzero(B - np.diag(np.diagonal(B))) == 0:
        d = np.real(np.diagonal(B))
        if np.any(d <= 0):
            raise NumericalError(
                f"B is not positive definite: Cholesky pivot {int(np.argmax(d <= 0)) + 1} failed")
        s = 1.0 / np.sqrt(d)
        C = s[:, None] * A * s[None, :]
        C = 0.5 * (C + C.conj().T)
        w, U = _eigh(C)
        V = s[:, None] * U
    else:
        L = _cholesky_lower(B)
        X = sla.solve_triangular(L, A, lower=True)
        C = sla.solve_triangular(L, X.conj().T, lower=True).conj().T
        C = 0.5 * (C + C.conj().T)
        w, U = _eigh(C)
        V = sla.solve_triangular(L.conj().T, U, lower=False)
    res = np.linalg.norm(A @ V - (B @ V) * w[None, :], axis=0)
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    worst = float(np.max(res)) if res.size else 0.0
    if worst > residual_tol * scale:
        raise NumericalError(
            f"generalized eigen-residual {worst:.3e} exceeds {residual_tol:.1e} * ||A||")
    return w, V


def _eigh(C):
    try:
        return sla.eigh(C)
    except sla.LinAlgError as exc:
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc


def general_eig(A, vectors=False):
    """Eigenvalues (optionally right eigenvectors) of a general complex matrix."""
    try:
        if vectors:
            return sla.eig(A)
        return sla.eigvals(A)
    except sla.LinAlgError as exc:
        raise NumericalError(f"general eigensolver did not converge: {exc}") from exc


def determinant(A):
    return sla.det(A)


def solve(A, b):
    """Linear solve that reports singular systems as NumericalError."""
    with warnings.catch_warnings():
        # exact singularity is reported below as a NumericalError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    diag = np.abs(np.diagonal(lu))
    if diag.size and diag.min() <= 10 * A.shape[0] * np.finfo(float).eps * diag.max():
        raise NumericalError("singular linear system")
    return sla.lu_solve((lu, piv), b)


@dataclass(frozen=True)
class ContourNodes:
    """Trapezoid nodes on a circle, weights folded with -1/(2 pi i).

    ``sum(weight * f(zeta))`` approximates ``-1/(2 pi i) \\oint f(zeta) d zeta``
    taken counter-clockwise.
    """

    center: complex
    radius: float
    zeta: np.ndarray
    weight: np.ndarray

    def __len__(self):
        return self.zeta.size

    def __iter__(self):
        return iter(zip(self.zeta, self.weight))

    def integrate(self, values):
        """Apply the rule to samples stacked along axis 0."""
        values = np.asarray(values)
        return np.tensordot(self.weight, values, axes=(0, 0))


def contour_nodes(center, radius, M):
    if M < 4:
        raise ValueError("contour quadrature needs M >= 4")
    if not radius > 0:
        raise ValueError("contour radius must be positive")
    phase = np.exp(2j * np.pi * np.arange(M) / M)
    zeta = center + radius * phase
    weight = -radius * phase / M
    return ContourNodes(complex(center), float(radius), zeta, weight)


def bisect(f, lo, hi, tol=None):
    """Root of a sign-changing scalar function on [lo, hi]."""
    if tol is None:
        tol = DEFAULT_TOLERANCES.bisect
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NumericalError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}")
    return scipy.optimize.bisect(f, lo, hi, xtol=tol * max(abs(lo), abs(hi), 1e-300),
                                 rtol=4 * np.finfo(float).eps, maxiter=2000)
