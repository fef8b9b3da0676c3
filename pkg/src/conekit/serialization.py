"""File formats for forms, metrics, link specifications, and reports.

Everything is plain structured text: JSON for objects and certificates,
CSV for tables.  Writes are atomic (temp file plus rename) and CSV bodies
are deterministic for a fixed seed, so reruns produce byte-identical
tables; volatile metadata such as timestamps lives in a separate manifest.
"""

import csv
import json
import os
import tempfile

import numpy as np

from .exterior import AlternatingForm, MetricTensor
from .products import SphereFactor

__all__ = [
    "atomic_write_text",
    "write_json",
    "read_json",
    "write_csv",
    "form_to_dict",
    "form_from_dict",
    "metric_to_dict",
    "metric_from_dict",
    "factor_from_dict",
    "load_form",
    "load_metric",
]


def _fmt(x) -> str:
    """Shortest round-trip decimal form, stable across runs."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return np.format_float_scientific(float(x), unique=True)


def atomic_write_text(path: str, text: str):
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _NumpyEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer, np.bool_)):
            return obj.item()
        return super().default(obj)


def write_json(path: str, payload: dict):
    atomic_write_text(path, json.dumps(payload, indent=2, cls=_NumpyEncoder) + "\n")


def read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path: str, header: list, rows):
    """Deterministically formatted CSV table."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def form_to_dict(phi: AlternatingForm) -> dict:
    return {
        "n": phi.n,
        "m": phi.m,
        "coefficients": {
            ",".join(str(i) for i in I): c for I, c in sorted(phi.coeffs.items())
        },
    }


def form_from_dict(data: dict) -> AlternatingForm:
    coeffs = {
        tuple(int(s) for s in key.split(",")): float(val)
        for key, val in data["coefficients"].items()
    }
    return AlternatingForm(int(data["n"]), int(data["m"]), coeffs)


def metric_to_dict(g: MetricTensor) -> dict:
    return {"n": g.n, "matrix": g.matrix.tolist()}


def metric_from_dict(data: dict) -> MetricTensor:
    return MetricTensor(np.asarray(data["matrix"], dtype=float))


def factor_from_dict(data: dict, base_dir: str = ".") -> SphereFactor:
    """Link factor from a specification entry.

    {"type": "sphere", "dim": k} builds a round sphere; {"type": "sampled",
    "path": file} loads unit points and optional normals from JSON.
    """
    kind = data.get("type")
    if kind == "sphere":
        return SphereFactor.round(int(data["dim"]))
    if kind == "sampled":
        payload = read_json(os.path.join(base_dir, data["path"]))
        return SphereFactor(
            dim=int(payload["dim"]),
            ambient=int(payload["ambient"]),
            points=np.asarray(payload["points"], dtype=float),
            normals=(
                np.asarray(payload["normals"], dtype=float)
                if payload.get("normals") is not None
                else None
            ),
        )
    raise ValueError(f"unknown factor type {kind!r}")


def load_form(data, base_dir: str = ".") -> AlternatingForm:
    if isinstance(data, str):
        data = read_json(os.path.join(base_dir, data))
    return form_from_dict(data)


def load_metric(data, base_dir: str = ".") -> MetricTensor:
    if isinstance(data, str):
        data = read_json(os.path.join(base_dir, data))
    return metric_from_dict(data)
