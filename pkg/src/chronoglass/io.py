"""JSON encodings of matrices, states, channels and Choi matrices.

Schemas::

    matrix  {"rows": r, "cols": c, "data": [[re, im], ...]}     (row-major, r*c pairs)
    channel {"in_dim": n, "out_dim": m,
             "terms": [{"weight": [re, im], "kraus": <matrix>}, ...]}
    choi    {"in_dim": n, "out_dim": m, "matrix": <matrix>}
    tensor  {"leg_dims": [d, ...], "data": [[re, im], ...]}

Real numbers are also accepted wherever a ``[re, im]`` pair is expected.
"""

import json
from pathlib import Path

import numpy as np

from ._validation import DimensionError
from .channel import ChoiMatrix, KrausMap
from .tensors import TensorNode

__all__ = [
    "SchemaError",
    "matrix_to_json",
    "matrix_from_json",
    "channel_to_json",
    "channel_from_json",
    "choi_to_json",
    "choi_from_json",
    "tensor_from_json",
    "tensor_to_json",
    "load_json",
    "dumps",
]


class SchemaError(ValueError):
    """The JSON document does not follow the documented schema."""


def _complex(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise SchemaError(f"{where}: expected a number or [re, im] pair, got {x!r}")


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _entries(data, where):
    if not isinstance(data, list):
        raise SchemaError(f"{where}: data must be a list")
    return np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(data)], dtype=complex)


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": [_pair(z) for z in m.reshape(-1)]}


def matrix_from_json(obj, name="matrix"):
    if not isinstance(obj, dict) or not {"rows", "cols", "data"} <= set(obj):
        raise SchemaError(f"{name}: expected an object with rows, cols, data")
    rows, cols = obj["rows"], obj["cols"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise SchemaError(f"{name}: rows and cols must be positive integers")
    vals = _entries(obj["data"], f"{name}.data")
    if vals.size != rows * cols:
        raise DimensionError(
            f"{name}: data has {vals.size} entries, expected rows*cols = {rows * cols}"
        )
    if not np.all(np.isfinite(vals)):
        raise SchemaError(f"{name}: non-finite entries")
    return vals.reshape(rows, cols)


def channel_to_json(n):
    return {
        "in_dim": int(n.in_dim),
        "out_dim": int(n.out_dim),
        "terms": [{"weight": _pair(c), "kraus": matrix_to_json(k)} for c, k in n.terms],
    }


def channel_from_json(obj, name="channel"):
    if not isinstance(obj, dict) or not {"in_dim", "out_dim", "terms"} <= set(obj):
        raise SchemaError(f"{name}: expected an object with in_dim, out_dim, terms")
    terms = obj["terms"]
    if not isinstance(terms, list) or not terms:
        raise SchemaError(f"{name}.terms must be a non-empty list")
    parsed = []
    for i, t in enumerate(terms):
        if not isinstance(t, dict) or "kraus" not in t:
            raise SchemaError(f"{name}.terms[{i}] needs a kraus matrix")
        w = _complex(t.get("weight", 1.0), f"{name}.terms[{i}].weight")
        parsed.append((w, matrix_from_json(t["kraus"], f"{name}.terms[{i}].kraus")))
    return KrausMap(int(obj["in_dim"]), int(obj["out_dim"]), tuple(parsed))


def choi_to_json(j):
    return {"in_dim": int(j.in_dim), "out_dim": int(j.out_dim), "matrix": matrix_to_json(j.matrix)}


def choi_from_json(obj, name="choi"):
    if not isinstance(obj, dict) or not {"in_dim", "out_dim", "matrix"} <= set(obj):
        raise SchemaError(f"{name}: expected an object with in_dim, out_dim, matrix")
    m = matrix_from_json(obj["matrix"], f"{name}.matrix")
    return ChoiMatrix(m, int(obj["in_dim"]), int(obj["out_dim"]))


def tensor_to_json(t):
    return {"leg_dims": list(t.leg_dims), "data": [_pair(z) for z in t.data.reshape(-1)]}


def tensor_from_json(obj, name="tensor"):
    if isinstance(obj, dict) and {"rows", "cols", "data"} <= set(obj):
        return matrix_from_json(obj, name)
    if not isinstance(obj, dict) or not {"leg_dims", "data"} <= set(obj):
        raise SchemaError(f"{name}: expected an object with leg_dims, data")
    return TensorNode(_entries(obj["data"], f"{name}.data"), tuple(obj["leg_dims"]))


def load_json(path, name=None):
    """Read and parse ``path``; errors name the file."""
    name = name or str(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"{name}: cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{name}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _default(o):
    if isinstance(o, np.ndarray):
        if o.ndim == 2:
            return matrix_to_json(o)
        return [_default(x) for x in o]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (complex, np.complexfloating)):
        return _pair(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(obj):
    """Deterministic JSON (sorted keys) with numpy objects encoded per schema."""
    return json.dumps(obj, default=_default, sort_keys=True, indent=2)
