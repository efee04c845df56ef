"""Matrix files and deterministic report encoding.

Matrices are stored as ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in
row-major order. Floats are written with 17 significant digits, which is enough
for an exact round trip of every IEEE double.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .errors import ParameterError

TOOL_VERSION = "0.1.0"


def fmt(x: float) -> str:
    """Fixed 17-significant-digit scientific notation (``nan``/``inf`` spelled out)."""
    x = float(x)
    if not np.isfinite(x):
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return f"{x:.16e}"


def _fixed(obj):
    # normalize numpy scalars and tuples into plain JSON types
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _fixed(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fixed(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _json_float(x: float) -> str:
    if np.isnan(x):
        return "NaN"
    if np.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return fmt(x)


def _no_default(o):
    raise TypeError(f"cannot encode {type(o).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-digit floats, trailing newline."""
    # the pure-Python encoder accepts a custom float formatter; the C one does not
    chunks = json.encoder._make_iterencode(  # type: ignore[attr-defined]
        {}, _no_default, json.encoder.py_encode_basestring, None, _json_float,
        ": ", ", ", False, False, True,
    )(_fixed(obj), 0)
    return "".join(chunks) + "\n"


def matrix_to_dict(a) -> dict:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ParameterError("matrix_to_dict needs a 2-D array")
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.ravel()],
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    try:
        rows, cols, data = int(d["rows"]), int(d["cols"]), d["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed matrix object: {exc}") from None
    if len(data) != rows * cols or any(len(p) != 2 for p in data):
        raise ParameterError(f"matrix data must hold {rows * cols} [re, im] pairs")
    arr = np.array([complex(float(re), float(im)) for re, im in data], dtype=complex)
    return arr.reshape(rows, cols)


def matrix_to_csv(a) -> str:
    """One line per row; each cell is ``re,im`` so a row has ``2 * cols`` fields."""
    a = np.asarray(a, dtype=complex)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in a:
        w.writerow([s for z in row for s in (fmt(z.real), fmt(z.imag))])
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if any(len(r) % 2 for r in rows) or len({len(r) for r in rows}) > 1:
        raise ParameterError("CSV matrix rows must have equal, even field counts")
    vals = [[complex(float(r[k]), float(r[k + 1])) for k in range(0, len(r), 2)] for r in rows]
    return np.array(vals, dtype=complex)


def write_matrix(path: str | Path, a, fmt_name: str = "json", header: dict | None = None) -> Path:
    path = Path(path)
    if fmt_name == "json":
        body = dict(header or {})
        body.update(matrix_to_dict(a))
        path.write_text(dumps(body))
    elif fmt_name == "csv":
        lines = "".join(f"# {k}={json.dumps(v)}\n" for k, v in (header or {}).items())
        path.write_text(lines + matrix_to_csv(a))
    else:
        raise ParameterError(f"unknown format {fmt_name!r}")
    return path


def read_matrix(path: str | Path) -> np.ndarray:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".csv":
        return matrix_from_csv("\n".join(l for l in text.splitlines() if not l.startswith("#")))
    try:
        return matrix_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: not valid JSON ({exc})") from None


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical JSON form of a configuration."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def provenance(config: dict, seed: int | None) -> dict:
    return {"tool_version": TOOL_VERSION, "config_hash": config_hash(config), "seed": seed}
