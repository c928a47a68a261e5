"""Deterministic CSV and JSON writers.

Floats are written with ``repr`` (shortest round-trip form), so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, columns, rows) -> Path:
    """Header row plus one line per row; ``rows`` are dicts or sequences."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                row = [row.get(c) for c in columns]
            w.writerow([_cell(v) for v in row])
    return path


def read_csv(path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else repr(f)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n")
    return path


def write_report(directory, stem, columns, rows, fmt: str = "csv") -> Path:
    """Write a report table as ``stem.csv`` or as ``stem.json`` (a list of records)."""
    rows = [r if isinstance(r, dict) else dict(zip(columns, r)) for r in rows]
    if fmt == "json":
        return write_json(Path(directory) / f"{stem}.json",
                          [{c: r.get(c) for c in columns} for r in rows])
    return write_csv(Path(directory) / f"{stem}.csv", columns, rows)


def snapshot(state) -> dict:
    """Spectral coefficients of one state keyed by mode label."""
    layout = state.u.spec.layout
    u = {}
    ut = {}
    for m in layout.modes:
        sl = layout.slice(m)
        u[m.label()] = state.u.data[sl]
        ut[m.label()] = state.ut.data[sl]
    return {"time": state.time, "u": u, "ut": ut}
