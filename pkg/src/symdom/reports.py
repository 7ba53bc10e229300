"""CSV and JSON serialization helpers (floats written with 17 significant digits)."""

from __future__ import annotations

import csv
import io
import json
from typing import Any, Iterable, Sequence

import numpy as np


def fmt(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def parse_complex(x: Any) -> complex:
    """``[re, im]`` pair or a real number."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex numbers are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(float(x))
    raise ValueError(f"cannot read a complex number from {x!r}")


def parse_vector(x: Any) -> np.ndarray:
    if not isinstance(x, (list, tuple)):
        raise ValueError(f"expected a list of complex entries, got {x!r}")
    return np.array([parse_complex(v) for v in x], dtype=complex)
