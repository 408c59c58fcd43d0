"""Fraction-free integer elimination: rank, nullspace and column space bases."""

from __future__ import annotations

from math import gcd

import numpy as np


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        g = gcd(g, v)
    if g > 1:
        row = [v // g for v in row]
    return row


def row_echelon(a) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form (rows kept primitive) and pivot columns.

    Entries stay Python ints throughout, so no rounding can occur.
    """
    rows = [[int(v) for v in r] for r in np.asarray(a, dtype=object)]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r]
        pv = piv[c]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = _primitive([pv * x - f * y for x, y in zip(rows[i], piv)])
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(a) -> int:
    return len(row_echelon(a)[1])


def nullspace(a) -> np.ndarray:
    """Integer basis (as columns) of {x : a x = 0}."""
    a = np.asarray(a, dtype=object)
    ncols = a.shape[1]
    rows, pivots = row_echelon(a)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        # rows are reduced: row i has nonzero only at its pivot among pivot columns
        vec = [0] * ncols
        scale = 1
        for i, p in enumerate(pivots):
            scale = scale * rows[i][p] // gcd(scale, rows[i][p])
        vec[f] = scale
        for i, p in enumerate(pivots):
            vec[p] = -rows[i][f] * scale // rows[i][p]
        basis.append(_primitive(vec))
    if not basis:
        return np.zeros((ncols, 0), dtype=object)
    return np.array(basis, dtype=object).T


def column_basis(a) -> np.ndarray:
    """A subset of the columns of a spanning its column space."""
    a = np.asarray(a, dtype=object)
    if a.shape[1] == 0:
        return a
    _, pivots = row_echelon(a)
    return a[:, pivots]
