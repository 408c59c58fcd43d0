"""Truncations of the 3-regular tree: spectra, distance operators, the resolvent
series, harmonic edge functions, and the integer function F on SL(2, Z)."""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import sparse
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import eigsh

DEPTH_CAP = 16
SQRT8 = math.sqrt(8)


@dataclass
class TruncatedTree:
    """Ball of radius ``depth`` around a root of the 3-regular tree, BFS order."""

    depth: int
    parent: np.ndarray
    level: np.ndarray
    q: int = 2

    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    def adjacency(self) -> sparse.csr_matrix:
        child = np.arange(1, self.n_vertices)
        par = self.parent[1:]
        n = self.n_vertices
        a = sparse.coo_matrix((np.ones(2 * len(child)), (np.r_[child, par], np.r_[par, child])), shape=(n, n))
        return a.tocsr()

    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency().sum(axis=1)).ravel().astype(int)

    def ball(self, radius: int) -> np.ndarray:
        return np.flatnonzero(self.level <= radius)

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n_vertices)]
        for v in range(1, self.n_vertices):
            adj[v].append(int(self.parent[v]))
            adj[int(self.parent[v])].append(v)
        return adj


def vertex_count(depth: int) -> int:
    return 1 + 3 * (2**depth - 1)


def build_tree(depth: int) -> TruncatedTree:
    if not 1 <= depth <= DEPTH_CAP:
        raise ValueError(f"depth must lie in [1, {DEPTH_CAP}]")
    parents = [np.array([-1])]
    levels = [np.array([0])]
    first = 0
    size = 1
    for ell in range(1, depth + 1):
        prev = np.arange(first, first + size)
        fan = 3 if ell == 1 else 2
        parents.append(np.repeat(prev, fan))
        levels.append(np.full(size * fan, ell))
        first += size
        size *= fan
    return TruncatedTree(depth, np.concatenate(parents), np.concatenate(levels))


# ---------------------------------------------------------------- spectra


def _path_eigs(offdiag) -> np.ndarray:
    m = len(offdiag) + 1
    if m == 1:
        return np.zeros(1)
    return eigh_tridiagonal(np.zeros(m), np.asarray(offdiag, dtype=float), eigvals_only=True)


def reduced_spectrum(depth: int) -> np.ndarray:
    """Adjacency spectrum via the spherical decomposition around the root.

    Sectors: radial functions (levels 0..D, first weight sqrt 3 then sqrt 2);
    the two root-antisymmetric sectors (levels 1..D); and at each vertex of
    level l >= 1 the functions odd under swapping its two subtrees (D - l levels).
    """
    parts = [_path_eigs([math.sqrt(3)] + [math.sqrt(2)] * (depth - 1))]
    parts += [_path_eigs([math.sqrt(2)] * (depth - 1))] * 2
    for ell in range(1, depth):
        parts.append(np.tile(_path_eigs([math.sqrt(2)] * (depth - ell - 1)), 3 * 2 ** (ell - 1)))
    return np.sort(np.concatenate(parts))


def adjacency_spectrum(tree: TruncatedTree, method: str = "auto") -> np.ndarray:
    """All adjacency eigenvalues, sorted. Dense symmetric solve for depth <= 10."""
    if method == "auto":
        method = "dense" if tree.depth <= 10 else "reduced"
    if method == "dense":
        return np.linalg.eigvalsh(tree.adjacency().toarray())
    if method == "reduced":
        return reduced_spectrum(tree.depth)
    raise ValueError(f"unknown method {method!r}")


def extreme_eigenvalues(tree: TruncatedTree) -> tuple[float, float]:
    """Smallest and largest adjacency eigenvalue by sparse Lanczos (independent of the reduction)."""
    a = tree.adjacency()
    hi = eigsh(a, k=1, which="LA", return_eigenvectors=False, tol=1e-12)[0]
    lo = eigsh(a, k=1, which="SA", return_eigenvectors=False, tol=1e-12)[0]
    return float(lo), float(hi)


# ---------------------------------------------------------------- distance operators


def distance_operators(tree: TruncatedTree, k_max: int) -> list[sparse.csr_matrix]:
    """D(0..k_max) by the non-backtracking recurrence A D(k) = D(k+1) + (Deg - 1) D(k-1)."""
    a = tree.adjacency()
    n = tree.n_vertices
    deg = sparse.diags(tree.degrees().astype(float))
    one = sparse.identity(n, format="csr")
    ops = [one]
    if k_max >= 1:
        ops.append(a)
    if k_max >= 2:
        ops.append((a @ a - deg).tocsr())
    for _ in range(3, k_max + 1):
        nxt = a @ ops[-1] - (deg - one) @ ops[-2]
        nxt.eliminate_zeros()
        ops.append(nxt.tocsr())
    return ops[: k_max + 1]


def distance_operator(tree: TruncatedTree, k: int) -> sparse.csr_matrix:
    if not 0 <= k <= 2 * tree.depth:
        raise ValueError("k must lie in [0, 2 * depth]")
    return distance_operators(tree, k)[k]


def interior_norm(tree: TruncatedTree, dk: sparse.csr_matrix, k: int) -> float:
    """||D(k) P|| with P the projection onto the ball of radius depth - k."""
    cols = tree.ball(tree.depth - k)
    m = dk[:, cols]
    if m.shape[1] <= 2:
        return float(np.linalg.norm(m.toarray(), 2))
    gram = (m.T @ m).astype(float)
    return float(math.sqrt(max(eigsh(gram, k=1, which="LA", return_eigenvectors=False, tol=1e-10)[0], 0.0)))


def dk_norm_report(depth: int = 12, k_max: int = 8) -> list[dict]:
    tree = build_tree(depth)
    ops = distance_operators(tree, k_max)
    out = []
    for k in range(1, k_max + 1):
        norm = interior_norm(tree, ops[k], k)
        bound = 3 * k * 2 ** (k / 2)
        out.append({"k": k, "norm": norm, "bound": bound, "ratio": norm / bound})
    return out


# ---------------------------------------------------------------- resolvent series


def lam_of_c(c) -> complex:
    return 2 ** (1 - c) + 2**c


def c_pm(lam) -> tuple[complex, complex]:
    """The two solutions of 2^(1-c) + 2^c = lam."""
    root = cmath.sqrt(lam * lam - 8)
    return tuple(cmath.log((lam + s * root) / 2) / math.log(2) for s in (1, -1))


def c_plus(lam) -> complex:
    """The solution with the larger real part (> 1/2 off the band)."""
    return max(c_pm(lam), key=lambda c: c.real)


def printed_d(c) -> complex:
    """The constant (3 2^-c - 1) / lam(c) in front of D(0) in the uncorrected series."""
    return (3 * 2 ** (-c) - 1) / lam_of_c(c)


def partial_sum_norm(c: float, K: int, tree: TruncatedTree | None = None) -> dict:
    """||(d + sum_{k<=K} 2^(-ck) D(k)) delta_root||, direct versus closed form."""
    d = printed_d(c).real
    tree = tree or build_tree(max(K + 1, 1))
    if tree.depth < K + 1:
        raise ValueError("tree depth must be at least K + 1")
    ops = distance_operators(tree, K)
    delta = np.zeros(tree.n_vertices)
    delta[0] = 1.0
    vec = d * delta
    for k in range(1, K + 1):
        vec = vec + 2 ** (-c * k) * (ops[k] @ delta)
    direct = float(np.linalg.norm(vec))
    if abs(2 - 4**c) < 1e-12:
        tail = 1.5 * K  # limit of 3 (2^((1-2c)K) - 1) / (2 - 4^c) at c = 1/2
    else:
        tail = 3 * (2 ** ((1 - 2 * c) * K) - 1) / (2 - 4**c)
    formula = math.sqrt(d * d + tail)
    return {"c": c, "K": K, "d": d, "direct": direct, "formula": formula, "error": abs(direct - formula)}


@dataclass
class ResolventReport:
    lam: complex
    c: complex
    scale: complex
    residuals: dict  # K -> total residual norm (infinite tree)
    interior: dict  # K -> residual norm on the ball of radius K - 1
    ratios: list = field(default_factory=list)
    ratio_bound: float = 0.0
    printed_d_defect: complex = 0
    divergent: bool = False
    warning: str | None = None

    def first_below(self, tol: float):
        return next((k for k, r in sorted(self.residuals.items()) if r < tol), None)


def _radial_residual(lam, c, scale, K):
    """Residual of (Ad - lam) G_K delta - delta on sphere coefficients of the infinite tree.

    G_K = scale * sum_{k=0}^K 2^(-ck) D(k); radial functions suffice since the
    input is delta_root. Sphere k has 3 * 2^(k-1) vertices (k >= 1).
    """
    coef = np.array([scale * 2 ** (-c * k) for k in range(K + 1)] + [0, 0], dtype=complex)
    out = np.zeros(K + 2, dtype=complex)
    out[0] = 3 * coef[1] - lam * coef[0] - 1
    for k in range(1, K + 2):
        out[k] = coef[k - 1] + 2 * coef[k + 1] - lam * coef[k]
    sizes = np.array([1] + [3 * 2 ** (k - 1) for k in range(1, K + 2)], dtype=float)
    weights = np.abs(out) ** 2 * sizes
    return math.sqrt(weights.sum()), math.sqrt(weights[:K].sum())


def _tree_residual(lam, c, scale, K, tree):
    ops = distance_operators(tree, K)
    a = tree.adjacency()
    delta = np.zeros(tree.n_vertices, dtype=complex)
    delta[0] = 1
    g = sum(scale * 2 ** (-c * k) * (ops[k] @ delta) for k in range(K + 1))
    r = a @ g - lam * g - delta
    return float(np.linalg.norm(r)), float(np.linalg.norm(r[tree.ball(K - 1)]))


def resolvent_check(lam, K_values=range(1, 61), model: str = "radial", depth: int | None = None) -> ResolventReport:
    """Truncated resolvent series at lam, residual ||(Ad - lam) G_K delta_root - delta_root||.

    Consistent normalisation: G = (2^-c - 2^c)^-1 sum_{k>=0} 2^(-ck) D(k). The
    constant d = (3 2^-c - 1)/lam used in the printed series leaves a residual
    (d - 1) on the first sphere; that defect is reported as ``printed_d_defect``.
    """
    c = c_plus(lam)
    scale = 1 / (2 ** (-c) - 2**c)
    warning = None
    divergent = c.real <= 0.5 + 1e-12
    if c.real < 0.55:
        warning = f"Re c = {c.real:.4f} is close to 1/2; the series converges slowly or not at all"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    residuals, interior = {}, {}
    for K in K_values:
        if model == "radial":
            total, inner = _radial_residual(lam, c, scale, K)
        else:
            tree = build_tree(depth or K + 2)
            if tree.depth < K + 2:
                raise ValueError("explicit tree must have depth >= K + 2")
            total, inner = _tree_residual(lam, c, scale, K, tree)
        residuals[K], interior[K] = total, inner
    ks = sorted(residuals)
    ratios = [residuals[b] / residuals[a] for a, b in zip(ks, ks[1:]) if residuals[a] > 0]
    return ResolventReport(lam, c, scale, residuals, interior, ratios, 2 ** (0.5 - c.real) + 0.05, printed_d(c) - 1, divergent, warning)


# ---------------------------------------------------------------- harmonic edge functions


@dataclass
class EdgeTree:
    """Edges of the 3-regular tree within edge distance D of a root edge g.

    Vertex 0 and 1 are the endpoints of g; the others hang below them in two
    binary half-trees. Edge e >= 1 joins vertex e + 1 to its parent; edge 0 is g.
    """

    depth: int
    parent: np.ndarray  # parent[v] for v >= 2
    level: np.ndarray  # vertex distance from {0, 1}
    side: np.ndarray  # 0 or 1: bipartition class

    @property
    def n_edges(self) -> int:
        return len(self.parent) - 1

    def endpoints(self):
        tail = np.r_[0, self.parent[2:]]
        head = np.r_[1, np.arange(2, len(self.parent))]
        return tail, head

    def edge_distance(self) -> np.ndarray:
        return np.r_[0, self.level[2:]]


def build_edge_tree(depth: int) -> EdgeTree:
    parent = [-1, -1]
    level = [0, 0]
    side = [0, 1]
    frontier = [0, 1]
    for ell in range(1, depth + 1):
        nxt = []
        for v in frontier:
            for _ in range(2):
                parent.append(v)
                level.append(ell)
                side.append(1 - side[v])
                nxt.append(len(parent) - 1)
        frontier = nxt
    return EdgeTree(depth, np.array(parent), np.array(level), np.array(side))


def harmonic_vg(depth: int) -> dict:
    """v_g(h) = (-2)^-dist(g, h) on the truncated edge tree, with exact checks.

    Values are scaled by 2^D to stay integral. Edges are oriented from the
    class-0 endpoint to the class-1 endpoint, so d* v(x) = sign(x) * sum of v
    over the edges at x.
    """
    et = build_edge_tree(depth)
    dist = et.edge_distance()
    scaled = np.array([(-1) ** int(k) * 2 ** (depth - int(k)) for k in dist], dtype=object)
    tail, head = et.endpoints()
    orient_tail = np.where(et.side[tail] == 0, tail, head)
    orient_head = np.where(et.side[tail] == 0, head, tail)
    nv = len(et.parent)
    dstar = np.zeros(nv, dtype=object)
    for e in range(et.n_edges):
        dstar[orient_head[e]] += scaled[e]
        dstar[orient_tail[e]] -= scaled[e]
    interior_vertices = np.flatnonzero(et.level < depth)
    interior_ok = all(dstar[v] == 0 for v in interior_vertices)
    norm2 = sum(Fraction(int(x) ** 2, 4**depth) for x in scaled)
    # Delta_E v = d d* v, evaluated on edges whose endpoints are both interior
    lap = np.array([float(dstar[orient_head[e]] - dstar[orient_tail[e]]) / 2**depth for e in range(et.n_edges)])
    inner_edges = np.flatnonzero(np.maximum(et.level[tail], et.level[head]) < depth)
    return {
        "depth": depth,
        "n_edges": et.n_edges,
        "endpoint_dstar": (Fraction(int(dstar[0]), 2**depth), Fraction(int(dstar[1]), 2**depth)),
        "interior_dstar_zero": interior_ok,
        "norm2": norm2,
        "norm2_expected": 3 - Fraction(2, 2**depth),
        "laplacian_interior_sup": float(np.abs(lap[inner_edges]).max(initial=0.0)),
    }


# ---------------------------------------------------------------- Lemma F


LEMMA_F_M = [
    (-1, -1, 1, 0),
    (0, 1, -1, -1),
    (-1, 1, -1, 0),
    (0, -1, 1, -1),
]
LEMMA_F_M = LEMMA_F_M + [tuple(-x for x in m) for m in LEMMA_F_M]


def f_function(a: int, b: int, c: int, d: int) -> int:
    """ceil((ab + cd) / (a^2 + c^2)) for A = [[a, b], [c, d]] in SL(2, Z)."""
    if a * d - b * c != 1:
        raise ValueError("matrix is not in SL(2, Z)")
    if a == 0 and c == 0:
        raise ValueError("first column must be nonzero")
    num, den = a * b + c * d, a * a + c * c
    return -((-num) // den)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _t_range(base: int, step: int, bound: int):
    """Integers t with |base + t step| <= bound, as (lo, hi) or None."""
    if step == 0:
        return (-math.inf, math.inf) if abs(base) <= bound else None
    lo, hi = sorted(((-bound - base) / step, (bound - base) / step))
    return math.ceil(lo - 1e-12), math.floor(hi + 1e-12)


def sl2z_ball(H: int):
    """All [[a, b], [c, d]] in SL(2, Z) with max |entry| <= H, as an (m, 4) array."""
    rows = []
    for a in range(-H, H + 1):
        for c in range(-H, H + 1):
            if math.gcd(a, c) != 1:
                continue
            g, x, y = _ext_gcd(a, c)  # a x + c y = 1
            d0, b0 = x, -y
            rb, rd = _t_range(b0, a, H), _t_range(d0, c, H)
            if rb is None or rd is None:
                continue
            lo, hi = max(rb[0], rd[0]), min(rb[1], rd[1])
            if lo > hi:
                continue
            t = np.arange(lo, hi + 1, dtype=np.int64)
            rows.append(np.stack([np.full_like(t, a), b0 + t * a, np.full_like(t, c), d0 + t * c], axis=1))
    return np.concatenate(rows)


def _f_vec(m):
    a, b, c, d = m.T
    num, den = a * b + c * d, a * a + c * c
    return -((-num) // den)


def lemma_f_bruteforce(H: int) -> list[tuple]:
    """All (A, M) with |F(MA) - F(A)| > 1; empty when the lemma holds up to entry bound H."""
    if not 1 <= H <= 60:
        raise ValueError("H must lie in [1, 60]")
    A = sl2z_ball(H)
    fa = _f_vec(A)
    bad = []
    for m in LEMMA_F_M:
        p, q, r, s = m
        ma = np.stack([p * A[:, 0] + q * A[:, 2], p * A[:, 1] + q * A[:, 3], r * A[:, 0] + s * A[:, 2], r * A[:, 1] + s * A[:, 3]], axis=1)
        hit = np.flatnonzero(np.abs(_f_vec(ma) - fa) > 1)
        bad += [(tuple(A[i].tolist()), m) for i in hit]
    return bad
