"""JSON helpers shared by the serialization code and the CLI.

Complex numbers travel as ``[re, im]`` pairs.  File output goes through
:func:`dumps`, a small canonical writer that renders every float with 17
significant digits so that identical runs produce byte-identical reports.
"""

from __future__ import annotations

import json
import math
from typing import Any


def encode_complex(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(obj: Any) -> complex:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ValueError(f"expected a [re, im] pair, got {obj!r}")
    re, im = obj
    for part in (re, im):
        if isinstance(part, bool) or not isinstance(part, (int, float)):
            raise ValueError(f"expected a [re, im] pair of numbers, got {obj!r}")
    return complex(float(re), float(im))


def format_float(x: float) -> str:
    """Render a float with 17 significant digits (round-trip exact)."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return f"{x:.17g}"


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize to JSON with deterministic float formatting."""
    buf: list[str] = []
    _emit(obj, buf, indent, 0)
    buf.append("\n")
    return "".join(buf)


def loads(text: str) -> Any:
    return json.loads(text)


def _emit(obj: Any, buf: list, indent: int, level: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if obj is None:
        buf.append("null")
    elif isinstance(obj, bool):
        buf.append("true" if obj else "false")
    elif isinstance(obj, str):
        buf.append(json.dumps(obj))
    elif isinstance(obj, int):
        buf.append(str(obj))
    elif isinstance(obj, float):
        buf.append(format_float(obj))
    elif isinstance(obj, complex):
        _emit(encode_complex(obj), buf, indent, level)
    elif isinstance(obj, (list, tuple)):
        if not obj:
            buf.append("[]")
            return
        buf.append("[\n")
        for k, item in enumerate(obj):
            buf.append(pad)
            _emit(item, buf, indent, level + 1)
            buf.append(",\n" if k + 1 < len(obj) else "\n")
        buf.append(close_pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            buf.append("{}")
            return
        buf.append("{\n")
        items = list(obj.items())
        for k, (key, value) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            buf.append(pad + json.dumps(key) + ": ")
            _emit(value, buf, indent, level + 1)
            buf.append(",\n" if k + 1 < len(items) else "\n")
        buf.append(close_pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} value {obj!r}")
