"""Deterministic CSV / JSON writers shared by the exporters and the CLI."""

import json
import math

import numpy as np

CSV_FLOAT = "{:.16e}"  # 17 significant digits, round-trip exact for doubles


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return CSV_FLOAT.format(v)
    return str(v)


def write_csv(path, columns, rows, header=None):
    """Write rows with '#'-prefixed metadata lines and '\\n' line endings."""
    lines = []
    for key, value in (header or {}).items():
        lines.append(f"# {key}: {json.dumps(value, sort_keys=True, default=_jsonable)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)
    return text


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return _jsonable(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def canonical_json(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    text = canonical_json(obj)
    if path is not None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    return text
