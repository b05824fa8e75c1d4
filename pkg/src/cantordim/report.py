"""Deterministic JSON and CSV emitters.

Floats are rounded to 12 significant digits; non-finite floats become the
strings ``"inf"``, ``"-inf"`` and ``"nan"``.  Key order is insertion order,
so identical inputs produce byte-identical reports.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import math

import numpy as np

SIGNIFICANT_DIGITS = 12


def fmt_float(x: float) -> float | str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def plain(obj):
    """Convert reports, enums and numpy values into JSON-ready builtins."""
    if isinstance(obj, enum.Enum):
        return obj.value if not isinstance(obj, int) else int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.repr}
    return obj


def to_json(obj) -> str:
    return json.dumps(plain(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        out = fmt_float(v)
        return out if isinstance(out, str) else f"{float(v):.{SIGNIFICANT_DIGITS}g}"
    return v
