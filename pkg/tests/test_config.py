import json

import numpy as np
import pytest

from hcbloch.config import DEFAULT_TOLERANCES, Tolerances
from hcbloch.errors import ConfigError
from hcbloch.io import canonical_json, format_value, write_csv
from hcbloch.runconfig import brillouin_path, load_config, provenance, read_config

BASE = {"geometry": {"spheres": [{"center": [0.5, 0.5, 0.5], "radius": 0.25}]}}


def cfg(**extra):
    return load_config({**BASE, **extra})


def test_tolerance_defaults_and_overrides():
    assert DEFAULT_TOLERANCES.delta_snap == 1e-3
    t = DEFAULT_TOLERANCES.updated(pole=1e-9)
    assert t.pole == 1e-9 and DEFAULT_TOLERANCES.pole == 1e-12
    assert t.as_dict()["pole"] == 1e-9
    with pytest.raises(ConfigError, match="positive"):
        Tolerances(trace=-1.0)
    with pytest.raises(ConfigError, match="unknown"):
        DEFAULT_TOLERANCES.updated(nonsense=1.0)
    with pytest.raises(ConfigError):
        Tolerances(delta_snap=0.3)


def test_load_config_defaults():
    c = cfg()
    assert c.cutoff == 2 and c.delta_snap == 0.2 and c.bands == 10
    assert c.contrasts == (20 + 0j,)
    assert c.series.order == 6
    assert len(c.alpha_points()) == 1
    assert c.digest == cfg().digest
    assert c.digest != cfg(cutoff=1).digest


@pytest.mark.parametrize("extra,msg", [
    ({"cutoff": 7}, "cutoff"),
    ({"cutoff": True}, "cutoff"),
    ({"delta_snap": 0.3}, "delta_snap"),
    ({"alpha": {"point": [4.0, 0, 0]}}, "outside"),
    ({"alpha": {"point": [0, 0, 0], "path": "gamma-x"}}, "exactly one"),
    ({"alpha": {"path": "gamma-q"}}, "Brillouin"),
    ({"contrasts": []}, "nonempty"),
    ({"contrasts": [True]}, "contrast"),
    ({"contrasts": [[1, 2, 3]]}, "contrast"),
    ({"bands": 0}, "bands"),
    ({"series": {"order": 11}}, "order"),
    ({"series": {"quadrature": 8}}, "quadrature"),
    ({"series": {"bogus": 1}}, "series"),
    ({"radius": {"x": 1}}, "radius"),
    ({"path_offset": 0.5}, "path_offset"),
    ({"tolerances": {"trace": -1}}, "positive"),
    ({"colour": "red"}, "unknown config keys"),
])
def test_load_config_rejects(extra, msg):
    with pytest.raises(ConfigError, match=msg):
        cfg(**extra)


def test_geometry_errors():
    with pytest.raises(ConfigError, match="not strictly inside"):
        load_config({"geometry": {"spheres": [{"center": [0.5, 0.5, 0.5], "radius": 0.6}]}})
    with pytest.raises(ConfigError, match="malformed"):
        load_config({"geometry": {"spheres": [{"radius": 0.2}]}})
    with pytest.raises(ConfigError, match="geometry"):
        load_config({"cutoff": 1})


def test_read_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        read_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        read_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(BASE))
    assert read_config(good).cutoff == 2


def test_brillouin_path_layout():
    pts = brillouin_path("gamma-x-m-r", 4)
    assert pts[0][2] == "gamma-exact" and pts[0][1].is_zero
    assert len(pts) == 1 + 3 * 4 + 1
    s = [p[0] for p in pts]
    assert s[1] == 0.0 and all(b >= a for a, b in zip(s[1:], s[2:]))
    assert pts[-1][1].alpha == (np.pi, np.pi, np.pi)
    # the sampled Gamma point is lifted off zero to keep |alpha| > 0
    assert not pts[1][1].is_zero
    assert s[-1] == pytest.approx(np.pi * (1 + 1 + 1), rel=1e-5)


def test_alpha_list_points():
    c = cfg(alpha={"list": [[0, 0, 0], [1, 0, 0]]})
    pts = c.alpha_points()
    assert [p[0] for p in pts] == [0.0, 1.0]


def test_provenance_fields():
    p = provenance(cfg())
    assert set(p) == {"config_sha256", "tool_version", "ordering", "tolerances"}
    assert len(p["config_sha256"]) == 64


def test_format_and_csv(tmp_path):
    assert format_value(0.1) == "1.0000000000000001e-01"
    assert float(format_value(np.pi)) == np.pi
    assert format_value(np.int64(3)) == "3"
    assert format_value(True) == "true"
    assert format_value(float("nan")) == "nan"
    text = write_csv(tmp_path / "a.csv", ("a", "b"), [(1, 0.5)], {"k": [1, 2]})
    assert text == '# k: [1, 2]\na,b\n1,5.0000000000000000e-01\n'
    assert (tmp_path / "a.csv").read_bytes() == text.encode()


def test_canonical_json_handles_numpy():
    out = canonical_json({"b": np.float64(1.5), "a": np.array([1, 2]), "c": 1 + 2j})
    assert json.loads(out) == {"a": [1, 2], "b": 1.5, "c": [1.0, 2.0]}
    assert out == canonical_json({"c": 1 + 2j, "a": np.array([1, 2]), "b": np.float64(1.5)})


def test_canonical_json_non_finite():
    out = json.loads(canonical_json({"a": np.float64("nan"), "b": float("inf"), "c": np.float64("-inf")}))
    assert out == {"a": None, "b": "inf", "c": "-inf"}
