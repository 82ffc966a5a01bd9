"""JSON run configuration for the command-line tool."""

from dataclasses import dataclass, field, asdict
import hashlib
import json

import numpy as np

from .config import Tolerances
from .errors import ConfigError
from .fourier_basis import PATH_OFFSET, QuasiMomentum
from .geometry import InclusionShape, Sphere

BZ_POINTS = {
    "gamma": (0.0, 0.0, 0.0),
    "x": (np.pi, 0.0, 0.0),
    "m": (np.pi, np.pi, 0.0),
    "r": (np.pi, np.pi, np.pi),
}
GAMMA_EPS = 1e-6


@dataclass(frozen=True)
class SeriesOptions:
    group: int = 0
    order: int = 6
    quadrature: int = 64
    cutoff: int = 2          # series runs are contour-heavy; see README

    def __post_init__(self):
        if not isinstance(self.group, int) or self.group < 0:
            raise ConfigError("series.group must be a nonnegative integer")
        if not isinstance(self.order, int) or not 0 <= self.order <= 10:
            raise ConfigError("series.order must be an integer in [0, 10]")
        if not isinstance(self.quadrature, int) or self.quadrature < 16:
            raise ConfigError("series.quadrature must be an integer >= 16")
        if not isinstance(self.cutoff, int) or self.cutoff < 0:
            raise ConfigError("series.cutoff must be a nonnegative integer")


@dataclass(frozen=True)
class RunConfig:
    shape: InclusionShape
    cutoff: int = 2
    delta_snap: float = 0.2
    alpha: dict = field(default_factory=lambda: {"point": [1.0, 0.0, 0.0]})
    contrasts: tuple = (20.0,)
    bands: int = 10
    series: SeriesOptions = field(default_factory=SeriesOptions)
    radius: dict = None
    path_offset: float = PATH_OFFSET
    outputs: dict = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def digest(self):
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def alpha_points(self):
        """List of (path parameter, QuasiMomentum, flag) triples."""
        spec = self.alpha
        if "point" in spec:
            return [(0.0, QuasiMomentum(tuple(spec["point"])), "")]
        if "list" in spec:
            return [(float(i), QuasiMomentum(tuple(a)), "") for i, a in enumerate(spec["list"])]
        return brillouin_path(spec.get("path", "gamma-x-m-r"), spec.get("samples", 32))


def brillouin_path(name="gamma-x-m-r", samples=32):
    labels = name.lower().split("-")
    if len(labels) < 2 or any(l not in BZ_POINTS for l in labels):
        raise ConfigError(f"unknown Brillouin path {name!r}")
    if not isinstance(samples, int) or samples < 1:
        raise ConfigError("path samples must be a positive integer")

    def lift(label):
        p = np.array(BZ_POINTS[label])
        return np.full(3, GAMMA_EPS) if label == "gamma" else p

    out = []
    if labels[0] == "gamma":
        out.append((0.0, QuasiMomentum((0.0, 0.0, 0.0)), "gamma-exact"))
    s = 0.0
    for a_lab, b_lab in zip(labels[:-1], labels[1:]):
        a, b = lift(a_lab), lift(b_lab)
        length = float(np.linalg.norm(b - a))
        for i in range(samples):
            t = i / samples
            out.append((s + t * length, QuasiMomentum(tuple(a + t * (b - a))), ""))
        s += length
    out.append((s, QuasiMomentum(tuple(lift(labels[-1]))), ""))
    return out


def _contrast(value):
    if isinstance(value, bool):
        raise ConfigError("contrast must be a number or [re, im]")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    raise ConfigError(f"contrast {value!r} must be a number or [re, im]")


def _shape(spec):
    if not isinstance(spec, dict) or "spheres" not in spec:
        raise ConfigError("geometry must be an object with a 'spheres' list")
    spheres = []
    for s in spec["spheres"]:
        try:
            spheres.append(Sphere(tuple(s["center"]), s["radius"]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed sphere entry {s!r}") from exc
    return InclusionShape(tuple(spheres))


KNOWN_KEYS = {"geometry", "cutoff", "delta_snap", "alpha", "contrasts", "bands", "series",
              "radius", "path_offset", "outputs", "tolerances"}


def load_config(data):
    """Validate a parsed JSON document (dict) into a RunConfig."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "geometry" not in data:
        raise ConfigError("config needs a 'geometry' entry")
    shape = _shape(data["geometry"])
    cutoff = data.get("cutoff", 2)
    if not isinstance(cutoff, int) or isinstance(cutoff, bool) or not 0 <= cutoff <= 6:
        raise ConfigError("cutoff must be an integer in [0, 6]")
    delta = data.get("delta_snap", 0.2)
    if not isinstance(delta, (int, float)) or not 0 < delta < 0.25:
        raise ConfigError("delta_snap must lie in (0, 1/4)")
    alpha = data.get("alpha", {"point": [1.0, 0.0, 0.0]})
    if not isinstance(alpha, dict) or len(set(alpha) & {"point", "list", "path"}) != 1:
        raise ConfigError("alpha must give exactly one of 'point', 'list', 'path'")
    try:
        if "point" in alpha:
            QuasiMomentum(tuple(alpha["point"]))
        elif "list" in alpha:
            if not alpha["list"]:
                raise ConfigError("alpha.list is empty")
            for a in alpha["list"]:
                QuasiMomentum(tuple(a))
        else:
            brillouin_path(alpha["path"], alpha.get("samples", 32))
    except TypeError as exc:
        raise ConfigError(f"malformed alpha spec {alpha!r}") from exc
    contrasts = data.get("contrasts", [20.0])
    if not isinstance(contrasts, list) or not contrasts:
        raise ConfigError("contrasts must be a nonempty list")
    contrasts = tuple(_contrast(c) for c in contrasts)
    bands = data.get("bands", 10)
    if not isinstance(bands, int) or bands < 1:
        raise ConfigError("bands must be a positive integer")
    try:
        series = SeriesOptions(**data.get("series", {}))
    except TypeError as exc:
        raise ConfigError(f"bad series options: {exc}") from exc
    radius = data.get("radius")
    if radius is not None:
        if not isinstance(radius, dict):
            raise ConfigError("radius must be an object")
        extra = set(radius) - {"alpha", "d", "mu_minus", "buffered"}
        if extra:
            raise ConfigError(f"unknown radius keys: {sorted(extra)}")
    offset = data.get("path_offset", PATH_OFFSET)
    if not isinstance(offset, (int, float)) or not 0 <= offset < 0.5:
        raise ConfigError("path_offset must lie in [0, 1/2)")
    outputs = data.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be an object")
    tol_over = data.get("tolerances", {})
    if not isinstance(tol_over, dict):
        raise ConfigError("tolerances must be an object")
    try:
        tol = Tolerances().updated(**tol_over)
    except TypeError as exc:
        raise ConfigError(f"bad tolerance value: {exc}") from exc
    return RunConfig(shape, cutoff, float(delta), alpha, contrasts, bands, series, radius,
                     float(offset), outputs, tol, data)


def read_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return load_config(data)


def provenance(cfg):
    from . import __version__
    from .fourier_basis import ORDERING_VERSION
    return {
        "config_sha256": cfg.digest,
        "tool_version": __version__,
        "ordering": ORDERING_VERSION,
        "tolerances": cfg.tolerances.as_dict(),
    }
