"""Deterministic CSV, SVG and DOT writers."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

SCHEMA = "#schema=1"


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer, Fraction, str)):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            return "0"
        return repr(x)
    if x is None:
        return ""
    return str(x)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(columns, rows), encoding="utf-8")
    return path


def _jsonable(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if x is None:
        return None
    return str(x)


def json_text(columns, rows) -> str:
    """Same table as csv_text, as a JSON object with sorted keys."""
    body = {"schema": 1, "columns": list(columns), "rows": [[_jsonable(v) for v in row] for row in rows]}
    return json.dumps(body, sort_keys=True, indent=1) + "\n"


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != SCHEMA:
        raise ValueError(f"{path}: missing {SCHEMA} header")
    rows = list(csv.reader(lines[1:]))
    return rows[0], rows[1:]


# ---------------------------------------------------------------- SVG


def _svg(width, height, body) -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n' + "".join(body) + "</svg>\n"
    )


def svg_scatter(points, title: str = "", extent: float = 1.1, size: int = 600, circles=(1 / math.sqrt(2),), colors=None) -> str:
    """Eigenvalue scatter in the complex plane with optional reference circles."""
    pts = np.asarray(points, dtype=complex)
    margin = 30
    scale = (size - 2 * margin) / (2 * extent)
    cx = cy = size / 2

    def xy(z):
        return cx + z.real * scale, cy - z.imag * scale

    body = [
        f'<line x1="{margin}" y1="{cy}" x2="{size - margin}" y2="{cy}" stroke="#bbb"/>\n',
        f'<line x1="{cx}" y1="{margin}" x2="{cx}" y2="{size - margin}" stroke="#bbb"/>\n',
    ]
    for r in circles:
        body.append(f'<circle cx="{cx}" cy="{cy}" r="{r * scale:.3f}" fill="none" stroke="#88c" stroke-dasharray="4 3"/>\n')
    for i, z in enumerate(pts):
        x, y = xy(z)
        color = colors[i] if colors is not None else "black"
        body.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="1.6" fill="{color}"/>\n')
    if title:
        body.append(f'<text x="{margin}" y="20" font-family="sans-serif" font-size="14">{title}</text>\n')
    return _svg(size, size, body)


def _color(t: float) -> str:
    """Dark blue to yellow ramp for t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    r = int(255 * min(1.0, 2 * t))
    g = int(255 * t)
    b = int(255 * (1 - t) * 0.6 + 40 * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def svg_heatmap(values, x_range, y_range, title: str = "", cell: int = 4, log: bool = True) -> str:
    """Heatmap of a (rows = y, cols = x) grid; y increases upwards."""
    v = np.asarray(values, dtype=float)
    data = np.log10(np.maximum(v, 1e-300)) if log else v
    finite = data[np.isfinite(data)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo or 1.0
    h, w = data.shape
    top = 30
    body = []
    for i in range(h):
        y = top + (h - 1 - i) * cell
        for j in range(w):
            body.append(f'<rect x="{j * cell}" y="{y}" width="{cell}" height="{cell}" fill="{_color((data[i, j] - lo) / span)}"/>\n')
    label = f"{title}  re {x_range[0]:g}..{x_range[1]:g}, im {y_range[0]:g}..{y_range[1]:g}"
    body.append(f'<text x="4" y="20" font-family="sans-serif" font-size="12">{label}</text>\n')
    return _svg(w * cell, h * cell + top, body)


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def dot_graph(edges, name: str = "G", plus=None) -> str:
    """Undirected DOT graph; ``plus`` marks vertices drawn as boxes."""
    lines = [f"graph {name} {{"]
    if plus is not None:
        for v in plus:
            lines.append(f"  {v} [shape=box];")
    for u, w, label in edges:
        lines.append(f'  {u} -- {w} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
