"""Sphere inclusions, their Fourier data, and buffered-sphere contrast bounds."""

from dataclasses import dataclass
import hashlib
import json
import math

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 3:
            raise ConfigError("sphere center needs 3 coordinates")
        r = float(self.radius)
        if not r > 0:
            raise ConfigError(f"sphere radius must be positive, got {r!r}")
        if any(x - r <= 0.0 or x + r >= 1.0 for x in c):
            raise ConfigError("sphere not strictly inside cell")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", r)

    @property
    def volume(self):
        return 4.0 * math.pi * self.radius ** 3 / 3.0


@dataclass(frozen=True)
class InclusionShape:
    spheres: tuple

    def __post_init__(self):
        spheres = tuple(s if isinstance(s, Sphere) else Sphere(*s) for s in self.spheres)
        if not spheres:
            raise ConfigError("inclusion needs at least one sphere")
        for i, a in enumerate(spheres):
            for b in spheres[i + 1:]:
                gap = math.dist(a.center, b.center) - a.radius - b.radius
                if gap <= 0:
                    raise ConfigError("spheres overlap or touch")
        object.__setattr__(self, "spheres", spheres)

    @classmethod
    def sphere(cls, radius, center=(0.5, 0.5, 0.5)):
        return cls((Sphere(center, radius),))

    @property
    def volume(self):
        return sum(s.volume for s in self.spheres)

    def contains(self, points):
        points = np.atleast_2d(points)
        inside = np.zeros(points.shape[0], dtype=bool)
        for s in self.spheres:
            inside |= np.linalg.norm(points - np.asarray(s.center), axis=1) < s.radius
        return inside

    def is_cubic_symmetric(self):
        """True for a single sphere at the cell center (invariant under the cube group)."""
        return len(self.spheres) == 1 and np.allclose(self.spheres[0].center, 0.5, atol=0, rtol=0)

    def to_dict(self):
        return {"spheres": [{"center": list(s.center), "radius": s.radius} for s in self.spheres]}

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _sphere_profile(radius, q):
    """Fourier transform of the ball indicator at frequency magnitude q (cycles per unit)."""
    vol = 4.0 * np.pi * radius ** 3 / 3.0
    x = 2.0 * np.pi * np.asarray(q, dtype=float) * radius
    out = np.empty_like(x)
    # below x = 1 the closed form loses digits to cancellation; sum the Taylor series
    # 3 sum_k (-1)^k (2k + 2) x^(2k) / (2k + 3)!, which converges to eps by k = 12
    small = x < 1.0
    xs2 = x[small] ** 2
    acc = np.zeros_like(xs2)
    for k in range(12, -1, -1):
        acc = acc * xs2 + (-1) ** k * 3.0 * (2 * k + 2) / math.factorial(2 * k + 3)
    out[small] = acc
    xl = x[~small]
    out[~small] = 3.0 * (np.sin(xl) - xl * np.cos(xl)) / xl ** 3
    return vol * out


def indicator_fourier(shape, m):
    """int_D exp(-2 pi i m . x) dx for one index (3,) or a stack (..., 3)."""
    m = np.asarray(m, dtype=float)
    q = np.linalg.norm(m, axis=-1)
    total = np.zeros(q.shape, dtype=complex)
    for s in shape.spheres:
        phase = np.exp(-2j * np.pi * (m @ np.asarray(s.center)))
        total = total + phase * _sphere_profile(s.radius, q)
    if total.ndim == 0:
        return complex(total)
    return total


@dataclass(frozen=True)
class BufferedGeometry:
    """Inner radius a inside a concentric buffer of radius b (0 < a < b < 1/2)."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < self.b < 0.5):
            raise ConfigError("buffered geometry needs 0 < a < b < 1/2")


def c_l_coefficient(a, b, l):
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    if l < 1:
        raise ValueError("need l >= 1")
    p = 2 * l + 1
    return (l * b ** p + (l + 1) * a ** p) / ((l + 1) * (b ** p - a ** p))


def c_l_star(a, b, l):
    p = 2 * l + 1
    return (b ** p + a ** p) / (b ** p - a ** p)


@dataclass(frozen=True)
class ThetaBound:
    theta: float
    theta_inv: float
    l_at_max: object      # int, or None when the supremum is the l -> infinity limit
    upper_bound: float    # (b^3 + a^3) / (b^3 - a^3)


def theta_buffered_sphere(geom, b=None, l_max=64):
    """Contrast constant theta for a sphere of radius a buffered to radius b.

    ``geom`` is a BufferedGeometry, or the inner radius ``a`` with ``b`` given
    (raw radii are accepted because only the ratio a/b matters). The supremum
    over l of C_l(a, b) is scanned up to ``l_max`` and compared with the
    limiting value 1.
    """
    if isinstance(geom, BufferedGeometry):
        a, b = geom.a, geom.b
    else:
        a = float(geom)
        if b is None:
            raise ValueError("outer radius b is required with a raw inner radius")
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    values = [c_l_coefficient(a, b, l) for l in range(1, l_max + 1)]
    best = int(np.argmax(values))
    if values[best] > 1.0:
        theta_inv, l_at = values[best], best + 1
    else:
        theta_inv, l_at = 1.0, None
    bound = c_l_star(a, b, 1)
    if theta_inv > bound + 1e-12:
        raise ArithmeticError("theta^-1 exceeds the C_l* bound; inconsistent input")
    return ThetaBound(1.0 / theta_inv, theta_inv, l_at, bound)


def mu_minus_from_theta(theta):
    if not theta > 0:
        raise ValueError("theta must be positive")
    return min(0.5, theta / 2.0) - 0.5


def z_star(mu_minus):
    if not (-0.5 < mu_minus < 0.5):
        raise ValueError("mu_minus must lie in (-1/2, 1/2)")
    return (mu_minus + 0.5) / (mu_minus - 0.5)
