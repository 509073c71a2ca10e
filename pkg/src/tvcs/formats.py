"""Edge lists, JSON reports and CSV tables.

Edge list lines are ``src dst [weight]`` with an optional weight (default 1).
Lines starting with ``#`` are comments, except a ``# nodes: N`` header which
fixes the node count (so isolated trailing nodes survive a round trip).
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path

import numpy as np

from .errors import ParseError
from .netgen import RawConnectivity

SIGNIFICANT_DIGITS = 12
_NODES_HEADER = re.compile(r"#\s*nodes\s*[:=]\s*(\d+)\s*$", re.IGNORECASE)
_KIND_HEADER = re.compile(r"#\s*(directed|undirected)\b", re.IGNORECASE)


def parse_edge_list(text: str, directed=None, one_based: bool = False, n=None) -> RawConnectivity:
    """Parse edge-list text; ``c[dst, src] += weight`` for every line.

    ``directed=None`` follows a ``# directed`` / ``# undirected`` header line
    and defaults to directed without one.
    """
    edges = []
    declared = None
    header_kind = None
    offset = 1 if one_based else 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            m = _NODES_HEADER.match(stripped)
            if m:
                declared = int(m.group(1))
            kind = _KIND_HEADER.match(stripped)
            if kind and header_kind is None:
                header_kind = kind.group(1).lower() == "directed"
            continue
        parts = stripped.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'src dst [weight]', got {stripped!r}", lineno)
        try:
            src, dst = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"node ids must be integers, got {stripped!r}", lineno) from None
        try:
            weight = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(f"weight must be a number, got {parts[2]!r}", lineno) from None
        if not math.isfinite(weight):
            raise ParseError("weight must be finite", lineno)
        if weight < 0:
            raise ParseError(f"negative weight {weight}", lineno)
        src -= offset
        dst -= offset
        if src < 0 or dst < 0:
            base = "1" if one_based else "0"
            raise ParseError(f"node ids must be >= {base}", lineno)
        edges.append((src, dst, weight, lineno))
    if directed is None:
        directed = True if header_kind is None else header_kind
    if n is None:
        n = declared
    if n is None:
        n = max((max(s, d) for s, d, _, _ in edges), default=-1) + 1
    if n < 1:
        raise ParseError("edge list defines no nodes")
    c = np.zeros((n, n))
    for src, dst, weight, lineno in edges:
        if src >= n or dst >= n:
            raise ParseError(f"node id outside the declared range of {n} nodes", lineno)
        c[dst, src] += weight
        if not directed and src != dst:
            c[src, dst] += weight
    return RawConnectivity(c, directed)


def load_edge_list(path, directed=None, one_based: bool = False, n=None) -> RawConnectivity:
    text = Path(path).read_text()
    return parse_edge_list(text, directed=directed, one_based=one_based, n=n)


def format_edge_list(raw: RawConnectivity, one_based: bool = False) -> str:
    """Inverse of :func:`parse_edge_list`; undirected graphs list each pair once."""
    c = raw.c
    offset = 1 if one_based else 0
    lines = [f"# nodes: {raw.n}", f"# {'directed' if raw.directed else 'undirected'}; src dst weight"]
    dst, src = np.nonzero(c)
    for i, j in zip(dst.tolist(), src.tolist()):
        if not raw.directed and j > i:
            continue
        lines.append(f"{j + offset} {i + offset} {float(c[i, j])!r}")
    return "\n".join(lines) + "\n"


def save_edge_list(raw: RawConnectivity, path, one_based: bool = False) -> None:
    Path(path).write_text(format_edge_list(raw, one_based))


def round_sig(x: float, digits: int = SIGNIFICANT_DIGITS):
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def to_jsonable(obj):
    """Recursively convert numpy containers and round floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round_sig(float(obj))
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def format_csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if isinstance(row, dict):
            row = [row[h] for h in header]
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (float, np.floating)):
        r = round_sig(float(v))
        return "nan" if r is None else repr(r)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v
