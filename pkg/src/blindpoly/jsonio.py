"""JSON emission with floats rendered to 17 significant digits.

The stdlib encoder always uses the shortest round-trip repr; fixture and
summary files instead pin every float to 17 significant digits so documents
are byte-stable across writers and lossless for cross-implementation reads.
Reading uses plain ``json.load``.

Non-finite floats (which valid JSON cannot carry) are emitted as the string
sentinels "inf", "-inf" and "nan".
"""

from __future__ import annotations

import json
import math

import numpy as np


def format_float(value: float) -> str:
    """17-significant-digit decimal form of a float (lossless round trip)."""
    value = float(value)
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"-inf"' if value < 0 else '"inf"'
    return format(value, ".17g")


def _render(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    closing_pad = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_render(item, indent, level + 1) for item in obj]
        return "[\n" + ",\n".join(pad + item for item in items) + "\n" + closing_pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{json.dumps(str(key))}: {_render(value, indent, level + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(pad + item for item in items) + "\n" + closing_pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def dumps(obj, indent: int = 2) -> str:
    """Serialize to a JSON string with 17-significant-digit floats."""
    return _render(obj, indent, 0) + "\n"


def dump(obj, path, indent: int = 2) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(obj, indent))


def load(path):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)
