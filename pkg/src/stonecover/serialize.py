"""JSON/CSV helpers with an explicit encoding for infinity.

Python floats round-trip through ``repr``, so plain ``json`` already gives
exact float serialization; the only special value is ``inf``, which JSON
cannot express and which we write as the string ``"inf"``.
"""
from __future__ import annotations

import json
import math
from typing import Any

INF_TOKEN = "inf"


def encode_value(x: float | int | None) -> float | int | str | None:
    if isinstance(x, float) and math.isinf(x):
        if x < 0:
            raise ValueError("negative infinity has no encoding")
        return INF_TOKEN
    return x


def decode_value(x: Any) -> float:
    if isinstance(x, str):
        if x.strip().lower() in (INF_TOKEN, "+inf", "infinity"):
            return math.inf
        return float(x)
    return float(x)


def _encode_tree(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _encode_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode_tree(v) for v in obj]
    if isinstance(obj, float):
        return encode_value(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        # numpy scalar
        return _encode_tree(obj.item())
    return obj


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Deterministic JSON: sorted keys, ``inf`` as a string token."""
    return json.dumps(_encode_tree(obj), sort_keys=True, indent=indent, allow_nan=False)


def format_float(x: float) -> str:
    """CSV cell for a float; shortest round-trip repr, ``inf`` token for infinity."""
    if math.isinf(x):
        return INF_TOKEN
    return repr(float(x))
