"""The bipartite 3-regular graph of SL(2, Z/nZ): edges are group elements,
vertices are orbits of the order-three elements -R^-1 L and -L R^-1."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components

from .modular import factorize, sl2_array, sl2_order
from .operators import ContractViolation, ScaledIntegerOperator, involution_split

X_PLUS = (-1, -1, 1, 0)  # -R^-1 L
X_MINUS = (0, -1, 1, -1)  # -L R^-1
WORDS = {
    "L": (1, 1, 0, 1),
    "R": (1, 0, 1, 1),
    "Linv": (1, -1, 0, 1),
    "Rinv": (1, 0, -1, 1),
    "I": (-1, 0, 0, -1),
}


def _mul(x, g, n):
    """x @ g for one fixed matrix x and an (m, 4) array g of elements."""
    a, b, c, d = x
    return np.stack(
        [(a * g[:, 0] + b * g[:, 2]) % n, (a * g[:, 1] + b * g[:, 3]) % n, (c * g[:, 0] + d * g[:, 2]) % n, (c * g[:, 1] + d * g[:, 3]) % n],
        axis=1,
    )


def _rmul(g, x, n):
    """g @ x for an array g and one fixed matrix x."""
    a, b, c, d = x
    return np.stack(
        [(g[:, 0] * a + g[:, 1] * c) % n, (g[:, 0] * b + g[:, 1] * d) % n, (g[:, 2] * a + g[:, 3] * c) % n, (g[:, 2] * b + g[:, 3] * d) % n],
        axis=1,
    )


def _matmul2(x, y):
    a, b, c, d = x
    p, q, r, s = y
    return (a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s)


class GroupIndex:
    """Lexicographic indexing of SL(2, Z/nZ) with vectorised lookup."""

    def __init__(self, n: int):
        self.n = n
        self.elements = sl2_array(n)
        self.codes = self._code(self.elements)

    def _code(self, g):
        n = self.n
        return ((g[:, 0] * n + g[:, 1]) * n + g[:, 2]) * n + g[:, 3]

    def lookup(self, g) -> np.ndarray:
        codes = self._code(np.asarray(g))
        idx = np.searchsorted(self.codes, codes)
        if np.any(idx >= len(self.codes)) or np.any(self.codes[np.minimum(idx, len(self.codes) - 1)] != codes):
            raise ContractViolation("element outside SL(2, Z/nZ)")
        return idx

    def left(self, x) -> np.ndarray:
        """Index map g -> x g."""
        return self.lookup(_mul(x, self.elements, self.n))

    def right(self, x) -> np.ndarray:
        """Index map g -> g x."""
        return self.lookup(_rmul(self.elements, x, self.n))

    def __len__(self):
        return len(self.elements)


def _orbits(step: np.ndarray) -> np.ndarray:
    """Orbit label (smallest member) of each point under an order-three index map."""
    return np.minimum(np.minimum(np.arange(len(step)), step), step[step])


@dataclass
class CongruenceGraph:
    n: int
    group: GroupIndex = field(repr=False)
    side: str
    plus_of_edge: np.ndarray  # vertex id of the V+ endpoint of each edge
    minus_of_edge: np.ndarray  # vertex id of the V- endpoint
    n_plus: int
    n_minus: int

    @property
    def n_vertices(self) -> int:
        return self.n_plus + self.n_minus

    @property
    def n_edges(self) -> int:
        return len(self.plus_of_edge)

    def adjacency(self) -> csr_matrix:
        u, w = self.plus_of_edge, self.minus_of_edge
        nv = self.n_vertices
        m = coo_matrix((np.ones(2 * len(u)), (np.r_[u, w], np.r_[w, u])), shape=(nv, nv))
        return m.tocsr()

    def adjacency_lists(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n_vertices)]
        for u, w in zip(self.plus_of_edge.tolist(), self.minus_of_edge.tolist()):
            adj[u].append(w)
            adj[w].append(u)
        return adj

    def incidence(self) -> np.ndarray:
        """d: functions on vertices -> edge functions, (df)(e) = f(minus end) - f(plus end)."""
        d = np.zeros((self.n_edges, self.n_vertices))
        e = np.arange(self.n_edges)
        d[e, self.plus_of_edge] -= 1
        d[e, self.minus_of_edge] += 1
        return d

    def degrees(self) -> np.ndarray:
        return np.bincount(np.r_[self.plus_of_edge, self.minus_of_edge], minlength=self.n_vertices)


def build_graph(n: int, side: str = "left") -> CongruenceGraph:
    """Vertices are the orbits <X> g (``side='left'``) or g <X> (``'right'``)."""
    if n < 3:
        raise ValueError("the orbit graph needs n >= 3")
    grp = GroupIndex(n)
    move = grp.left if side == "left" else grp.right
    sp, sm = move(X_PLUS), move(X_MINUS)
    lp, lm = _orbits(sp), _orbits(sm)
    up, ip = np.unique(lp, return_inverse=True)
    um, im = np.unique(lm, return_inverse=True)
    g = CongruenceGraph(n, grp, side, ip, len(up) + im, len(up), len(um))
    _validate(g, sp, sm)
    return g


def _validate(g: CongruenceGraph, sp, sm):
    if g.n_edges != sl2_order(g.n):
        raise ContractViolation("edge count differs from |SL(2, Z/nZ)|")
    if not np.all(g.degrees() == 3):
        raise ContractViolation("graph is not 3-regular")
    # plus and minus orbits of an edge meet only in that edge
    plus = np.stack([np.arange(g.n_edges), sp, sp[sp]], axis=1)
    minus = np.stack([sm, sm[sm]], axis=1)
    if np.any(plus[:, :, None] == minus[:, None, :]):
        raise ContractViolation("orbits of an edge share more than one element")


def components(g: CongruenceGraph) -> tuple[int, list[int]]:
    k, labels = connected_components(g.adjacency(), directed=False)
    return k, sorted(np.bincount(labels).tolist())


def expected_components(n: int) -> int:
    """1 for odd n, 2 when n/2 is odd, 4 when 4 | n."""
    if n % 2:
        return 1
    return 2 if (n // 2) % 2 else 4


def _shortest_cycle_through(adj, root) -> float:
    dist = {root: 0}
    parent = {root: -1}
    queue = deque([root])
    best = math.inf
    while queue:
        u = queue.popleft()
        if 2 * dist[u] + 1 >= best:
            break
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                parent[w] = u
                queue.append(w)
            elif parent[u] != w:
                best = min(best, dist[u] + dist[w] + 1)
    return best


def girth(g: CongruenceGraph, roots=None) -> float:
    """Length of a shortest cycle.

    Right multiplication permutes edges and vertices and acts transitively on
    V+ and on V-, so one root on each side suffices unless ``roots`` is given.
    """
    adj = g.adjacency_lists()
    if roots is None:
        roots = [0, g.n_plus] if g.side == "left" else range(g.n_vertices)
    return min(_shortest_cycle_through(adj, r) for r in roots)


def girth_lower_bound(n: int) -> int:
    return 2 * math.floor(math.acosh(math.sqrt(5) * n / 4) / math.asinh(0.5)) - 2


@dataclass
class GraphSpectra:
    adjacency: np.ndarray
    vertex_laplacian: np.ndarray
    edge_laplacian: np.ndarray
    n_components: int
    ramanujan: bool
    nonzero_match: float
    edge_kernel: int


def graph_spectra(g: CongruenceGraph, tol: float = 1e-8) -> GraphSpectra:
    """Symmetric spectra of Ad, Delta_V = 3 - Ad and Delta_E = d d*."""
    ad = g.adjacency().toarray()
    ev_ad = np.linalg.eigvalsh(ad)
    d = g.incidence()
    ev_v = np.linalg.eigvalsh(d.T @ d)
    ev_e = np.linalg.eigvalsh(d @ d.T)
    k, _ = components(g)
    nz_v = np.sort(ev_v[ev_v > tol])
    nz_e = np.sort(ev_e[ev_e > tol])
    if len(nz_v) != len(nz_e):
        match = math.inf
    else:
        match = float(np.abs(nz_v - nz_e).max(initial=0.0))
    ev = np.sort(ev_ad)
    trivial_ok = np.allclose(ev[:k], -3, atol=1e-9) and np.allclose(ev[-k:], 3, atol=1e-9)
    ram = bool(trivial_ok and np.all(np.abs(ev[k:-k]) <= 2 * math.sqrt(2) + 1e-9))
    return GraphSpectra(ev_ad, ev_v, ev_e, k, ram, match, int((ev_e <= tol).sum()))


def _perm_operator(idx_map, labels, n) -> ScaledIntegerOperator:
    m = len(idx_map)
    num = np.zeros((m, m), dtype=np.int64)
    num[idx_map, np.arange(m)] = 1
    return ScaledIntegerOperator(num, 1, labels, n)


def combinatorial_edge_laplacian(g: CongruenceGraph) -> np.ndarray:
    """Integer matrix of d d* on edge functions, edges indexed by group elements."""
    d = np.zeros((g.n_edges, g.n_vertices), dtype=np.int64)
    e = np.arange(g.n_edges)
    d[e, g.plus_of_edge] = -1
    d[e, g.minus_of_edge] = 1
    return d @ d.T


def edge_laplacian_identity(n: int, side: str = "left") -> dict:
    """Compare d d* with 3 - I + R^-1 L + L^-1 R + L R^-1 + R L^-1 on even functions on G_n.

    The group acts by (O f)(g) = f(O^-1 g), so the matrix of O has a one at (O g, g).
    """
    g = build_graph(n, side)
    grp = g.group
    labels = tuple(map(tuple, grp.elements.tolist()))
    ops = {}
    for name, x in WORDS.items():
        ops[name] = _perm_operator(grp.left(x), labels, n)
    one = ops["I"].identity_like()
    formula = 3 * one - ops["I"] + ops["Rinv"] @ ops["L"] + ops["Linv"] @ ops["R"] + ops["L"] @ ops["Rinv"] + ops["R"] @ ops["Linv"]
    comb = ScaledIntegerOperator(combinatorial_edge_laplacian(g), 1, labels, n)
    neg = grp.left(WORDS["I"])
    sf, sc = involution_split(formula, neg), involution_split(comb, neg)
    if not (sf.commutes() and sc.commutes()):
        raise ContractViolation("an edge operator does not commute with -1")
    return {
        "n": n,
        "side": side,
        "even_dim": sf.plus_dim,
        "equal": sf.plus == sc.plus,
        "row_sums_formula": sorted(set(formula.num.sum(axis=1).tolist())),
        "row_sums_combinatorial": sorted(set(comb.num.sum(axis=1).tolist())),
    }


def _primitive_root(p: int) -> int:
    """Smallest generator of F_p^x, found by trying candidates in turn."""
    factors = factorize(p - 1)
    for alpha in range(2, p):
        if all(pow(alpha, (p - 1) // q, p) != 1 for q in factors):
            return alpha
    return 1  # p = 2


def induced_decomposition_check(p: int, tol: float = 1e-12) -> dict:
    """Ind_{p,j} = {f : f(g b) = psi_j(b) f(g)} for the Borel subgroup, j = 0..p-2."""
    if p < 3 or factorize(p) != {p: 1}:
        raise ValueError("p must be an odd prime")
    grp = GroupIndex(p)
    els = grp.elements
    alpha = _primitive_root(p)
    log = {pow(alpha, k, p): k for k in range(p - 1)}
    borel = [(a, b, 0, pow(a, -1, p)) for a in range(1, p) for b in range(p)]
    # cosets g B: canonical label = smallest index in the coset
    coset = np.full(len(grp), -1)
    reps = []
    for i in range(len(grp)):
        if coset[i] >= 0:
            continue
        members = grp.lookup(np.array([_rmul(els[i : i + 1], b, p)[0] for b in borel]))
        coset[members] = len(reps)
        reps.append(i)
    # position of each element inside its coset: g = rep * b  ->  b = rep^-1 g, psi depends on b[0]
    spaces = []
    for j in range(p - 1):
        psi = lambda a: np.exp(2j * np.pi * j * log[int(a)] / (p - 1))
        basis = np.zeros((len(grp), len(reps)), dtype=complex)
        for c, r in enumerate(reps):
            a, b, cc, d = els[r]
            inv = (d, -b % p, -cc % p, a)
            for idx in np.flatnonzero(coset == c):
                bb = _matmul2(inv, tuple(els[idx]))
                basis[idx, c] = psi(bb[0] % p)
        spaces.append(basis)
    dims = [np.linalg.matrix_rank(s) for s in spaces]
    stack = np.hstack(spaces)
    gram = stack.conj().T @ stack
    off = gram - np.diag(np.diag(gram))
    orthogonal = bool(np.abs(off).max() <= tol * np.abs(gram).max())
    invariant = True
    unipotent_invariant = True
    for name in ("L", "R"):
        # (rho(g) f)(x) = f(g^-1 x): row x of the new function reads row g^-1 x
        src = grp.left(WORDS[name + "inv"])
        for s in spaces:
            moved = s[src]
            coef, *_ = np.linalg.lstsq(s, moved, rcond=None)
            invariant &= bool(np.abs(s @ coef - moved).max() <= 1e-9)
    u = grp.right(WORDS["L"])  # right translation by [[1,1],[0,1]] generates U_p
    for s in spaces:
        unipotent_invariant &= bool(np.abs(s[u] - s).max() <= tol)
    return {
        "p": p,
        "generator": alpha,
        "dims": dims,
        "total": int(sum(dims)),
        "expected_total": p * p - 1,
        "orthogonal": orthogonal,
        "left_invariant": invariant,
        "in_new_space": unipotent_invariant,
        "min_dim_vs_3p_over_16": (min(dims), 3 * p / 16),
    }
