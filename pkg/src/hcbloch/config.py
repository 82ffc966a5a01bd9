"""Central tolerance record shared by every module."""

from dataclasses import dataclass, fields, replace

from .errors import ConfigError


@dataclass(frozen=True)
class Tolerances:
    eig_residual: float = 1e-10       # relative eigen-residual per pair
    hermitian: float = 1e-13          # relative Hermiticity check of pencils
    k_in_Z: float = 1e-10             # |k - Z| < k_in_Z * (1 + |k|) is rejected
    pole: float = 1e-12               # |z - pole| below this is a collision
    cluster: float = 1e-9             # relative clustering of sigma(A(0))
    min_gap: float = 1e-10            # unresolved clusters below this gap
    delta_snap: float = 1e-3
    idempotency: float = 1e-8
    trace: float = 1e-8
    zero_moment: float = 1e-8
    bisect: float = 1e-10
    contour_points: int = 64

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ConfigError(f"tolerance {f.name!r} must be positive, got {value!r}")
        if not self.delta_snap < 0.25:
            raise ConfigError("delta_snap must lie in (0, 1/4)")
        if self.contour_points < 4:
            raise ConfigError("contour_points must be >= 4")

    def updated(self, **overrides):
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **overrides)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = Tolerances()
