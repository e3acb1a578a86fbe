"""Reading and writing tables, co-occurrence pairs, grids and JSON reports.

Floats are written with ``repr``, the shortest decimal that reads back to the
same double, so every file round-trips bit-exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
from pathlib import Path

import numpy as np

from .grid import GridDensity, GridError
from .tables import SUM_TOL, ProbTable, TableError

SCHEMA = "depcore/1"

_SHAPE_RE = re.compile(r"#\s*rows\s*=\s*(\d+)\s+cols\s*=\s*(\d+)")
_LEVEL_RE = re.compile(r"level\s*=\s*(\d+)\s*$")


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_row(line: str, lineno: int) -> list[float]:
    try:
        return [float(v) for v in next(csv.reader([line]))]
    except ValueError as e:
        raise TableError(f"line {lineno}: {e}") from None


def parse_table(text: str) -> ProbTable:
    """Parse a numeric matrix; ``#`` lines are comments, one may declare the shape.

    Weights that do not already sum to one within ``1e-12`` are normalized.
    """
    shape = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _SHAPE_RE.match(line)
            if m:
                shape = (int(m.group(1)), int(m.group(2)))
            continue
        rows.append(_parse_row(line, lineno))
    if not rows:
        raise TableError("table file is empty")
    if len({len(r) for r in rows}) != 1:
        raise TableError("table rows have different lengths")
    w = np.array(rows)
    if shape is not None and w.shape != shape:
        raise TableError(f"header declares shape {shape}, data has {w.shape}")
    if np.all(np.isfinite(w)) and abs(w.sum() - 1.0) <= SUM_TOL:
        return ProbTable(w)
    return ProbTable.from_weights(w)


def format_table(t: ProbTable, comments: list[str] | None = None) -> str:
    R, S = t.shape
    lines = [f"# rows={R} cols={S}"]
    lines += [f"# {c}" for c in comments or []]
    lines += [",".join(_fmt(v) for v in row) for row in t.probs]
    return "\n".join(lines) + "\n"


def read_table(path) -> ProbTable:
    return parse_table(Path(path).read_text())


def write_table(t: ProbTable, path, comments=None) -> None:
    Path(path).write_text(format_table(t, comments))


def parse_pairs(text: str) -> tuple[ProbTable, list[str], list[str]]:
    """Co-occurrence table from ``x,y[,count]`` rows.

    Labels get indices in order of first appearance. A missing count means
    one observation. ``#`` lines are skipped.

    Returns
    -------
    table, row_labels, col_labels
    """
    xs: dict[str, int] = {}
    ys: dict[str, int] = {}
    obs = []
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    for lineno, rec in enumerate(csv.reader(lines), 1):
        rec = [f.strip() for f in rec]
        if len(rec) not in (2, 3):
            raise TableError(f"pairs row {lineno}: expected x,y[,count], got {len(rec)} fields")
        try:
            count = float(rec[2]) if len(rec) == 3 else 1.0
        except ValueError:
            raise TableError(f"pairs row {lineno}: bad count {rec[2]!r}") from None
        if not math.isfinite(count) or count < 0:
            raise TableError(f"pairs row {lineno}: count must be finite and nonnegative")
        i = xs.setdefault(rec[0], len(xs))
        j = ys.setdefault(rec[1], len(ys))
        obs.append((i, j, count))
    if not obs:
        raise TableError("pairs file is empty")
    w = np.zeros((len(xs), len(ys)))
    for i, j, c in obs:
        w[i, j] += c
    return ProbTable.from_weights(w), list(xs), list(ys)


def parse_grid(text: str) -> GridDensity:
    """Grid CSV: a ``level=K`` line followed by ``2^K`` rows of ``2^K`` values."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GridError("grid file is empty")
    m = _LEVEL_RE.match(lines[0].lstrip("#").strip())
    if not m:
        raise GridError("grid file must start with a 'level=K' header")
    level = int(m.group(1))
    rows = [_parse_row(ln, k) for k, ln in enumerate(lines[1:], 2) if not ln.startswith("#")]
    n = 1 << level
    if len(rows) != n or any(len(r) != n for r in rows):
        raise GridError(f"level={level} needs a {n}x{n} grid")
    return GridDensity.from_values(np.array(rows))


def format_grid(g: GridDensity) -> str:
    lines = [f"level={g.level}"]
    lines += [",".join(_fmt(v) for v in row) for row in g.values]
    return "\n".join(lines) + "\n"


def format_matrix(a: np.ndarray, header: str | None = None) -> str:
    """Plot-ready CSV of a surface; NaN cells are written as empty fields."""
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    for row in np.atleast_2d(a):
        buf.write(",".join("" if math.isnan(v) else _fmt(v) for v in row) + "\n")
    return buf.getvalue()


def jsonable(obj):
    """Convert numpy values to plain Python; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dump_json(obj) -> str:
    """Deterministic JSON: insertion key order, shortest round-trip floats."""
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"
