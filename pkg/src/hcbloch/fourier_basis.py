"""Divergence-free quasiperiodic plane-wave basis on the unit cell (0,1]^3.

Every basis function is ``e_hat * exp(i kappa . x)`` with ``kappa = 2 pi n + alpha``
and ``e_hat`` a unit vector orthogonal to ``kappa``; the functions are
orthonormal in L^2(Y). In this basis the L^2 Gram matrix is the identity and
the curl-curl (energy) Gram matrix is ``diag(|kappa|^2)``.
"""

from dataclasses import dataclass, field
from functools import cached_property
import itertools

import numpy as np

from .errors import ConfigError, ModeError

ORDERING_VERSION = "lex-n1n2n3-pol/v1"
# Offset of the averaging paths from the cell edges. Zero keeps the three
# paths images of each other under the cube group, so a centred inclusion
# yields an exactly isotropic effective tensor; any nonzero offset breaks that.
PATH_OFFSET = 0.0


@dataclass(frozen=True)
class QuasiMomentum:
    alpha: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha)
        if len(a) != 3:
            raise ConfigError(f"quasimomentum needs 3 components, got {len(a)}")
        for x in a:
            if not (-np.pi < x <= np.pi):
                raise ConfigError(f"quasimomentum component {x!r} outside (-pi, pi]")
        if any(a) and sum(x * x for x in a) < np.finfo(float).tiny:
            # |kappa|^2 of the n = 0 elements would underflow to zero
            raise ConfigError(f"quasimomentum {a!r} is nonzero but too small to represent |alpha|^2")
        object.__setattr__(self, "alpha", a)

    @property
    def is_zero(self):
        return all(x == 0.0 for x in self.alpha)

    @property
    def vector(self):
        return np.array(self.alpha)

    @property
    def norm(self):
        return float(np.linalg.norm(self.alpha))

    def negated(self):
        # -pi is outside the zone; fold it back to +pi
        return QuasiMomentum(tuple(np.pi if x == np.pi else -x for x in self.alpha))


def as_quasimomentum(alpha):
    if isinstance(alpha, QuasiMomentum):
        return alpha
    return QuasiMomentum(tuple(alpha))


@dataclass(frozen=True)
class BasisElement:
    n: tuple
    kappa: np.ndarray
    pol: int
    e_hat: np.ndarray


def polarizations(kappa):
    """The deterministic orthonormal pair spanning the plane orthogonal to kappa."""
    kappa = np.asarray(kappa, dtype=float)
    # work with the direction only; tiny |kappa| would otherwise underflow the cross products
    kappa = kappa / np.max(np.abs(kappa))
    kappa = kappa / np.linalg.norm(kappa)
    a = np.array([1.0, 0.0, 0.0])
    c = np.cross(kappa, a)
    if np.linalg.norm(c) < 1e-8:
        a = np.array([0.0, 1.0, 0.0])
        c = np.cross(kappa, a)
    e1 = c / np.linalg.norm(c)
    e2 = np.cross(kappa, e1)
    e2 /= np.linalg.norm(e2)
    return e1, e2


@dataclass(frozen=True, eq=False)
class PlaneWaveBasis:
    """Basis data stored column-wise; ``elements`` materializes per-element records."""

    quasimomentum: QuasiMomentum
    cutoff: int
    ns: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    pol: np.ndarray = field(repr=False)
    e_hat: np.ndarray = field(repr=False)

    def __len__(self):
        return self.ns.shape[0]

    @property
    def size(self):
        return len(self)

    @cached_property
    def kappa_sq(self):
        return np.einsum("ij,ij->i", self.kappa, self.kappa)

    @cached_property
    def curl_vectors(self):
        """Real vectors ``kappa x e_hat``; curl of element m is ``i * curl_vectors[m] * phase``."""
        return np.cross(self.kappa, self.e_hat)

    @property
    def elements(self):
        return [BasisElement(tuple(int(v) for v in n), k.copy(), int(p), e.copy())
                for n, k, p, e in zip(self.ns, self.kappa, self.pol, self.e_hat)]

    def index_of(self, n, pol):
        hits = np.nonzero(np.all(self.ns == np.asarray(n), axis=1) & (self.pol == pol))[0]
        if hits.size == 0:
            raise KeyError((tuple(n), pol))
        return int(hits[0])

    def evaluate(self, coeffs, points):
        """Field values at ``points`` (P x 3) for coefficient vector ``coeffs``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        phases = np.exp(1j * points @ self.kappa.T)
        return (phases * coeffs[None, :]) @ self.e_hat

    def evaluate_curl(self, coeffs, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        phases = np.exp(1j * points @ self.kappa.T)
        return 1j * (phases * coeffs[None, :]) @ self.curl_vectors


def build_basis(alpha, N):
    alpha = as_quasimomentum(alpha)
    if int(N) != N or N < 0:
        raise ConfigError(f"cutoff must be a non-negative integer, got {N!r}")
    N = int(N)
    avec = alpha.vector
    ns, kappas, pols, ehats = [], [], [], []
    for n in itertools.product(range(-N, N + 1), repeat=3):
        if alpha.is_zero and n == (0, 0, 0):
            continue
        kappa = 2 * np.pi * np.array(n, dtype=float) + avec
        e1, e2 = polarizations(kappa)
        for pol, e in ((1, e1), (2, e2)):
            ns.append(n)
            kappas.append(kappa)
            pols.append(pol)
            ehats.append(e)
    return PlaneWaveBasis(alpha, N, np.array(ns, dtype=int).reshape(-1, 3),
                          np.array(kappas).reshape(-1, 3), np.array(pols, dtype=int),
                          np.array(ehats).reshape(-1, 3))


@dataclass(frozen=True, eq=False)
class FieldCoefficients:
    basis: PlaneWaveBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (len(self.basis),):
            raise ValueError(f"expected {len(self.basis)} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    def l2_norm(self):
        return float(np.linalg.norm(self.coeffs))

    def curl_norm(self):
        return float(np.sqrt(np.sum(self.basis.kappa_sq * np.abs(self.coeffs) ** 2)))

    def to_raw(self):
        """Collapse the two polarizations of each lattice index into a 3-vector."""
        b = self.basis
        keys, inv = np.unique(b.ns, axis=0, return_inverse=True)
        vals = np.zeros((keys.shape[0], 3), dtype=complex)
        np.add.at(vals, inv.ravel(), self.coeffs[:, None] * b.e_hat)
        return RawVectorField(b.quasimomentum, keys, vals)


def l2_inner(u, v):
    return complex(np.vdot(v.coeffs, u.coeffs))


def energy_inner(u, v):
    """<u, v> = int_Y curl u . conj(curl v)."""
    return complex(np.vdot(v.coeffs, u.basis.kappa_sq * u.coeffs))


@dataclass(frozen=True, eq=False)
class RawVectorField:
    """Finite Fourier series ``sum_n h(n) exp(i (2 pi n + alpha) . x)`` of 3-vectors."""

    quasimomentum: QuasiMomentum
    ns: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ns = np.asarray(self.ns, dtype=int).reshape(-1, 3)
        vals = np.asarray(self.values, dtype=complex).reshape(-1, 3)
        if ns.shape[0] != vals.shape[0]:
            raise ValueError("ns and values must have the same length")
        if np.unique(ns, axis=0).shape[0] != ns.shape[0]:
            raise ValueError("duplicate lattice indices in raw field")
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "values", vals)

    @property
    def kappa(self):
        return 2 * np.pi * self.ns + self.quasimomentum.vector[None, :]

    def l2_inner(self, other):
        """L^2(Y) inner product; both fields must share index order."""
        if not np.array_equal(self.ns, other.ns):
            raise ValueError("fields are indexed differently")
        return complex(np.sum(self.values * np.conj(other.values)))

    def evaluate(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(1j * points @ self.kappa.T) @ self.values

    def __add__(self, other):
        if not np.array_equal(self.ns, other.ns):
            raise ValueError("fields are indexed differently")
        return RawVectorField(self.quasimomentum, self.ns, self.values + other.values)


@dataclass(frozen=True, eq=False)
class HelmholtzParts:
    gradient: RawVectorField
    solenoidal: RawVectorField
    constant: np.ndarray

    def scalar_potential(self):
        """Coefficients ``-i (kappa . h) / |kappa|^2`` of h_pot (zero where kappa = 0)."""
        g = self.gradient
        k = g.kappa
        k2 = np.einsum("ij,ij->i", k, k)
        safe = np.where(k2 > 0, k2, 1.0)
        # gradient coefficients are kappa (kappa . h)/|kappa|^2, so kappa . grad = kappa . h
        return np.where(k2 > 0, -1j * np.einsum("ij,ij->i", k, g.values) / safe, 0.0)

    def vector_potential(self):
        """Coefficients ``i kappa x h / |kappa|^2`` of h_curl (zero where kappa = 0)."""
        s = self.solenoidal
        k = s.kappa
        k2 = np.einsum("ij,ij->i", k, k)
        safe = np.where(k2 > 0, k2, 1.0)[:, None]
        return np.where(k2[:, None] > 0, 1j * np.cross(k, s.values) / safe, 0.0)

    def reconstruct(self):
        vals = self.gradient.values + self.solenoidal.values
        zero = np.all(self.gradient.ns == 0, axis=1)
        if self.gradient.quasimomentum.is_zero:
            vals = vals + zero[:, None] * self.constant[None, :]
        return RawVectorField(self.gradient.quasimomentum, self.gradient.ns, vals)


def helmholtz_decompose(field):
    """Split a raw field into gradient, divergence-free and constant parts."""
    k = field.kappa
    k2 = np.einsum("ij,ij->i", k, k)
    regular = k2 > 0
    safe = np.where(regular, k2, 1.0)
    longitudinal = k * (np.einsum("ij,ij->i", k, field.values) / safe)[:, None]
    longitudinal[~regular] = 0.0
    transverse = field.values - longitudinal
    transverse[~regular] = 0.0
    const = np.zeros(3, dtype=complex)
    if not np.all(regular):
        # only alpha = 0, n = 0 has kappa = 0
        const = field.values[~regular][0].copy()
    qm = field.quasimomentum
    return HelmholtzParts(RawVectorField(qm, field.ns, longitudinal),
                          RawVectorField(qm, field.ns, transverse), const)


def greens_multiplier(alpha, n):
    """Fourier symbol -1/|2 pi n + alpha|^2 of the quasiperiodic Green's function."""
    alpha = as_quasimomentum(alpha)
    kappa = 2 * np.pi * np.asarray(n, dtype=float) + alpha.vector
    k2 = float(kappa @ kappa)
    if k2 == 0.0:
        raise ModeError("Green's function symbol undefined at the zero wavevector (alpha = 0, n = 0)")
    return -1.0 / k2


def inverse_laplacian(field):
    return FieldCoefficients(field.basis, field.coeffs / field.basis.kappa_sq)


def curl_gram(basis):
    """Gram matrix of int_Y curl phi_m . conj(curl phi_m') (block diagonal in n)."""
    same_n = np.all(basis.ns[:, None, :] == basis.ns[None, :, :], axis=2)
    c = basis.curl_vectors
    return (c @ c.T) * same_n


def gradient_gram(basis):
    """Gram matrix of int_Y grad phi_m : conj(grad phi_m')."""
    same_n = np.all(basis.ns[:, None, :] == basis.ns[None, :, :], axis=2)
    k, e = basis.kappa, basis.e_hat
    return (k @ k.T) * (e @ e.T) * same_n


def average_paths(offset=PATH_OFFSET):
    """Start point and direction of the three cell-edge segments used by geometric_average."""
    d = float(offset)
    starts = np.array([[0.0, d, d], [d, 0.0, d], [d, d, 0.0]])
    return starts, np.eye(3)


def geometric_average_matrix(basis, offset=PATH_OFFSET):
    """3 x M matrix mapping coefficients to the geometric average (alpha = 0 only).

    Along the axis-i path ``x = s + t e_i`` only modes with n_i = 0 survive,
    each picking up the phase ``exp(i kappa . s)``.
    """
    if not basis.quasimomentum.is_zero:
        raise ModeError("the geometric average is defined for alpha = 0 only")
    starts, _ = average_paths(offset)
    G = np.zeros((3, len(basis)), dtype=complex)
    for i in range(3):
        alive = basis.ns[:, i] == 0
        phase = np.exp(1j * basis.kappa @ starts[i])
        G[i] = np.where(alive, basis.e_hat[:, i] * phase, 0.0)
    return G


def check_paths(shape, offset=PATH_OFFSET):
    """Raise if any averaging segment meets the inclusion (periodic images included)."""
    starts, dirs = average_paths(offset)
    names = ("x", "y", "z")
    for i in range(3):
        for sphere in shape.spheres:
            c = np.asarray(sphere.center)
            # nearest periodic image offset perpendicular to the segment
            rel = c - starts[i]
            perp = rel - rel[i] * dirs[i]
            perp -= np.round(perp)
            if np.linalg.norm(perp) <= sphere.radius:
                raise ModeError(
                    f"geometric-average path along {names[i]} from {tuple(starts[i])} "
                    f"intersects inclusion centered at {tuple(c)}")


def geometric_average(field, offset=PATH_OFFSET, shape=None):
    """Path-integral average of an alpha = 0 field along the three cell edges."""
    if shape is not None:
        check_paths(shape, offset)
    if isinstance(field, FieldCoefficients):
        return geometric_average_matrix(field.basis, offset) @ field.coeffs
    if not field.quasimomentum.is_zero:
        raise ModeError("the geometric average is defined for alpha = 0 only")
    starts, _ = average_paths(offset)
    out = np.zeros(3, dtype=complex)
    kappa = field.kappa
    for i in range(3):
        alive = field.ns[:, i] == 0
        phase = np.exp(1j * kappa[alive] @ starts[i])
        out[i] = np.sum(field.values[alive, i] * phase)
    return out
