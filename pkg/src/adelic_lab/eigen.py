"""Dense nonsymmetric eigensolver and spectral classification.

The solver follows the classical route: diagonal balancing by powers of two,
Householder reduction to upper Hessenberg form, then Francis double-shift QR
with deflation on small subdiagonals. The kernels are compiled with numba.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

DIM_CAP = 4000
MAX_SWEEPS = 200  # per deflation; large nilpotent clusters need well over the classical 30
INV_SQRT2 = 1 / math.sqrt(2)


class ConvergenceError(RuntimeError):
    """QR iteration stalled; ``block`` holds the unconverged index range (lo, hi)."""

    def __init__(self, block, its):
        super().__init__(f"QR iteration did not converge on rows {block[0]}..{block[1]} after {its} sweeps")
        self.block = block


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _balance(a):
    """Scale rows/columns by powers of 2 so row and column norms are comparable (in place)."""
    n = a.shape[0]
    scale = np.ones(n)
    noconv = True
    while noconv:
        noconv = False
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i])
                    r += abs(a[i, j])
            if c == 0.0 or r == 0.0:
                continue
            g = r / 2.0
            f = 1.0
            s = c + r
            while c < g:
                f *= 2.0
                c *= 4.0
            g = r * 2.0
            while c > g:
                f /= 2.0
                c /= 4.0
            if (c + r) / f < 0.95 * s:
                noconv = True
                scale[i] *= f
                for j in range(n):
                    a[i, j] /= f
                for j in range(n):
                    a[j, i] *= f
    return scale


@njit(cache=True)
def _hessenberg(a, q, want_q):
    """Householder reduction A -> Q^T A Q, upper Hessenberg (in place)."""
    n = a.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        v = a[k + 1 :, k].copy()
        scale = np.abs(v).max()
        if scale == 0.0:
            continue
        v /= scale  # squares of tiny entries would underflow
        alpha = math.sqrt(np.dot(v, v))
        if v[0] > 0:
            alpha = -alpha
        v[0] -= alpha
        vn = np.dot(v, v)
        if vn == 0.0:
            continue
        beta = 2.0 / vn
        # rows k+1.., columns k..
        w = np.zeros(n - k)
        for i in range(m):
            vi = v[i]
            for j in range(k, n):
                w[j - k] += vi * a[k + 1 + i, j]
        for i in range(m):
            bi = beta * v[i]
            for j in range(k, n):
                a[k + 1 + i, j] -= bi * w[j - k]
        # columns k+1.., all rows
        for i in range(n):
            s = 0.0
            for j in range(m):
                s += a[i, k + 1 + j] * v[j]
            s *= beta
            for j in range(m):
                a[i, k + 1 + j] -= s * v[j]
        if want_q:
            for i in range(n):
                s = 0.0
                for j in range(m):
                    s += q[i, k + 1 + j] * v[j]
                s *= beta
                for j in range(m):
                    q[i, k + 1 + j] -= s * v[j]
        a[k + 1, k] = alpha * scale
        for i in range(k + 2, n):
            a[i, k] = 0.0


@njit(cache=True)
def _hqr(h, z, want_z, max_its):
    """Francis double-shift QR on an upper Hessenberg matrix.

    Returns (wr, wi, info); info = (-1, -1) on success, otherwise the block
    (l, nn) that failed to converge. With ``want_z`` the full quasi-triangular
    form is kept and the transformations are accumulated into z.
    """
    n = h.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    eps = 2.220446049250313e-16
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(h[i, j])
    nn = n - 1
    its = 0
    while nn >= 0:
        l = nn
        while l > 0:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) <= eps * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        x = h[nn, nn]
        if l == nn:
            wr[nn] = x
            nn -= 1
            its = 0
            continue
        y = h[nn - 1, nn - 1]
        w = h[nn, nn - 1] * h[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            zz = math.sqrt(abs(q))
            if q >= 0.0:
                zz = p + math.copysign(zz, p)
                wr[nn - 1] = x + zz
                wr[nn] = x + zz
                if zz != 0.0:
                    wr[nn] = x - w / zz
            else:
                wr[nn - 1] = x + p
                wr[nn] = x + p
                wi[nn - 1] = zz
                wi[nn] = -zz
            nn -= 2
            its = 0
            continue
        if its == max_its:
            return wr, wi, (l, nn)
        if its > 0 and its % 10 == 0:
            # exceptional shift
            s = abs(h[nn, nn - 1]) + abs(h[nn - 1, nn - 2])
            x = h[nn, nn] + 0.75 * s
            y = x
            w = -0.4375 * s * s
        its += 1
        m = nn - 2
        p = q = r = 0.0
        while True:
            zm = h[m, m]
            r = x - zm
            s = y - zm
            p = (r * s - w) / h[m + 1, m] + h[m, m + 1]
            q = h[m + 1, m + 1] - zm - r - s
            r = h[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(h[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(h[m - 1, m - 1]) + abs(zm) + abs(h[m + 1, m + 1]))
            if u <= eps * v:
                break
            m -= 1
        for i in range(m + 2, nn + 1):
            h[i, i - 2] = 0.0
            if i != m + 2:
                h[i, i - 3] = 0.0
        jmax = n - 1 if want_z else nn
        ilo = 0 if want_z else l
        for k in range(m, nn):
            xk = 0.0
            if k != m:
                p = h[k, k - 1]
                q = h[k + 1, k - 1]
                r = 0.0
                if k + 1 != nn:
                    r = h[k + 2, k - 1]
                xk = abs(p) + abs(q) + abs(r)
                if xk != 0.0:
                    p /= xk
                    q /= xk
                    r /= xk
            s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    h[k, k - 1] = -h[k, k - 1]
            else:
                h[k, k - 1] = -s * xk
                h[k + 1, k - 1] = 0.0
                if k + 1 != nn:
                    h[k + 2, k - 1] = 0.0
            p += s
            xx = p / s
            yy = q / s
            zz = r / s
            q /= p
            r /= p
            for j in range(k, jmax + 1):
                pp = h[k, j] + q * h[k + 1, j]
                if k + 1 != nn:
                    pp += r * h[k + 2, j]
                    h[k + 2, j] -= pp * zz
                h[k + 1, j] -= pp * yy
                h[k, j] -= pp * xx
            mmin = nn if nn < k + 3 else k + 3
            for i in range(ilo, mmin + 1):
                pp = xx * h[i, k] + yy * h[i, k + 1]
                if k + 1 != nn:
                    pp += zz * h[i, k + 2]
                    h[i, k + 2] -= pp * r
                h[i, k + 1] -= pp * q
                h[i, k] -= pp
            if want_z:
                for i in range(n):
                    pp = xx * z[i, k] + yy * z[i, k + 1]
                    if k + 1 != nn:
                        pp += zz * z[i, k + 2]
                        z[i, k + 2] -= pp * r
                    z[i, k + 1] -= pp * q
                    z[i, k] -= pp
    return wr, wi, (-1, -1)


# ---------------------------------------------------------------- drivers


def _as_float(matrix) -> np.ndarray:
    to_float = getattr(matrix, "to_float", None)
    a = to_float() if to_float else np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    if a.shape[0] > DIM_CAP:
        raise ValueError(f"dimension {a.shape[0]} exceeds the eigensolver cap {DIM_CAP}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return np.array(a, dtype=np.float64, order="C")


def _prescale(a) -> float:
    """Divide a by a power of two near its largest entry (exact); returns the factor."""
    big = float(np.abs(a).max()) if a.size else 0.0
    if big == 0.0:
        return 1.0
    f = 2.0 ** math.frexp(big)[1]
    a /= f
    return f


def eigvals_raw(matrix, max_its: int = MAX_SWEEPS) -> np.ndarray:
    """All eigenvalues of a real square matrix (complex array, unsorted)."""
    a = _as_float(matrix)
    if a.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    f = _prescale(a)
    _balance(a)
    dummy = np.zeros((1, 1))
    _hessenberg(a, dummy, False)
    wr, wi, info = _hqr(a, dummy, False, max_its)
    if info[0] >= 0:
        raise ConvergenceError(info, max_its)
    return f * (wr + 1j * wi)


def schur(matrix, max_its: int = MAX_SWEEPS):
    """Real quasi-triangular form: returns (T, Q, eigenvalues) with A Q = Q T."""
    a = _as_float(matrix)
    n = a.shape[0]
    q = np.eye(n)
    f = _prescale(a)
    _hessenberg(a, q, True)
    wr, wi, info = _hqr(a, q, True, max_its)
    if info[0] >= 0:
        raise ConvergenceError(info, max_its)
    return f * np.triu(a, -1), q, f * (wr + 1j * wi)


def schur_backward_error(matrix) -> float:
    a = _as_float(matrix)
    t, q, _ = schur(a)
    norm = np.linalg.norm(a)
    return float(np.linalg.norm(a @ q - q @ t) / (norm if norm else 1.0))


# ---------------------------------------------------------------- spectra

TAGS = ("One", "MinusOne", "PlusHalf", "MinusHalf", "Zero", "OnCircle", "GapReal", "Other")
_POINTS = (("One", 1.0), ("MinusOne", -1.0), ("PlusHalf", 0.5), ("MinusHalf", -0.5), ("Zero", 0.0))


@dataclass
class Spectrum:
    values: np.ndarray
    clusters: list = field(default_factory=list)  # (representative, multiplicity)
    tags: list | None = None  # one per cluster
    source: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.values)

    def multiplicity(self, z, tol=1e-6) -> int:
        return sum(m for c, m in self.clusters if abs(c - z) <= tol)

    def tag_counts(self) -> dict:
        out = dict.fromkeys(TAGS, 0)
        for (_, m), t in zip(self.clusters, self.tags or []):
            out[t] += m
        return out

    def radius(self) -> float:
        return float(np.abs(self.values).max()) if self.dim else 0.0

    def sorted_values(self) -> np.ndarray:
        v = self.values
        return v[np.lexsort((np.round(v.imag, 9), np.round(v.real, 9)))]


def cluster(values, radius: float = 1e-6) -> list[tuple[complex, int]]:
    """Single-linkage clusters of eigenvalues closer than ``radius``; sorted by (re, im)."""
    values = np.asarray(values, dtype=complex)
    if len(values) == 0:
        return []
    pts = np.column_stack([values.real, values.imag])
    pairs = cKDTree(pts).query_pairs(radius, output_type="ndarray")
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(values),) * 2)
    k, labels = connected_components(g, directed=False)
    out = []
    for c in range(k):
        members = values[labels == c]
        out.append((complex(members.mean()), len(members)))
    out.sort(key=lambda cm: (round(cm[0].real, 9), round(cm[0].imag, 9)))
    return out


def eigenvalues(matrix, cluster_radius: float = 1e-6, source=None) -> Spectrum:
    """Spectrum of a dense real matrix (ndarray or ScaledIntegerOperator)."""
    vals = eigvals_raw(matrix)
    a = _as_float(matrix) if vals.size else None
    scale = max(1.0, float(np.abs(a).sum(axis=0).max())) if vals.size else 1.0
    return Spectrum(vals, cluster(vals, cluster_radius * scale), None, dict(source or {}))


def classify_value(z: complex, tol_circle: float = 1e-6, tol_point: float = 1e-6) -> str:
    for tag, x in _POINTS:
        if abs(z - x) <= tol_point:
            return tag
    if abs(abs(z) - INV_SQRT2) <= tol_circle:
        return "OnCircle"
    if abs(z.imag) <= tol_point and 0.5 + tol_point < abs(z.real) < 1 - tol_point:
        return "GapReal"
    return "Other"


def classify(spec: Spectrum, tol_circle: float = 1e-6, tol_point: float = 1e-6) -> Spectrum:
    spec.tags = [classify_value(c, tol_circle, tol_point) for c, _ in spec.clusters]
    return spec


def gap_real_values(spec: Spectrum) -> list[float]:
    if spec.tags is None:
        classify(spec)
    out = []
    for (c, m), t in zip(spec.clusters, spec.tags):
        if t == "GapReal":
            out += [c.real] * m
    return out


def circle_inversion_pairs(spec: Spectrum, tol: float = 1e-6):
    """Greedily pair GapReal eigenvalues whose product is 1/2; returns (pairs, unpaired)."""
    left = sorted(gap_real_values(spec), key=abs, reverse=True)
    pairs = []
    unpaired = []
    while left:
        x = left.pop(0)
        hit = next((i for i, y in enumerate(left) if abs(x * y - 0.5) <= tol), None)
        if hit is None:
            unpaired.append(x)
        else:
            pairs.append((x, left.pop(hit)))
    return pairs, unpaired


# ---------------------------------------------------------------- Jordan structure


@dataclass
class JordanReport:
    eigenvalue: complex
    algebraic: int
    geometric: int
    rank_shift: int
    rank_shift_sq: int
    warning: str | None = None

    @property
    def defective(self) -> bool:
        return self.geometric < self.algebraic


def _numerical_rank(m, thresh):
    s = np.linalg.svd(m, compute_uv=False)
    r = int((s > thresh).sum())
    close = bool(np.any((s > thresh / 10) & (s < thresh * 10)))
    return r, close


def jordan_defect(matrix, lam, tol_rank: float = 1e-9, max_power: int = 12) -> JordanReport:
    """Geometric multiplicity from rank(A - lam); algebraic from where rank((A - lam)^k) stabilises."""
    a = _as_float(matrix).astype(complex)
    n = a.shape[0]
    thresh = tol_rank * max(np.linalg.norm(a, 2), 1.0)
    shifted = a - lam * np.eye(n)
    ranks = []
    undecided = False
    power = np.eye(n, dtype=complex)
    for _ in range(max_power):
        power = power @ shifted
        r, close = _numerical_rank(power, thresh)
        undecided |= close
        ranks.append(r)
        if len(ranks) > 1 and ranks[-1] == ranks[-2]:
            break
    geometric = n - ranks[0]
    algebraic = n - ranks[-1]
    warning = "singular value within a factor 10 of the rank threshold" if undecided else None
    if warning:
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    return JordanReport(complex(lam), algebraic, geometric, ranks[0], ranks[1] if len(ranks) > 1 else ranks[0], warning)


# ---------------------------------------------------------------- exact oracle


def charpoly_exact(matrix) -> list[Fraction]:
    """Coefficients of det(x - A), leading first, by Faddeev-LeVerrier over Q."""
    a = [[Fraction(int(v)) if float(v).is_integer() else Fraction(v) for v in row] for row in np.asarray(matrix)]
    n = len(a)
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        m = [[sum(a[i][t] * m[t][j] for t in range(n)) + (c if i == j else 0) for j in range(n)] for i in range(n)]
        am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def _pdivmod(a, b):
    """Polynomial division over Q, coefficient lists leading first."""
    a = list(a)
    q = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    while a and a[0] == 0:
        a.pop(0)
    return q, a


def _pgcd(a, b):
    while b:
        a, b = b, _pdivmod(a, b)[1]
    return [c / a[0] for c in a]


def _deriv(a):
    d = len(a) - 1
    return [c * (d - i) for i, c in enumerate(a[:-1])]


def squarefree_factors(coeffs) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: [(f_i, i)] with p = prod f_i^i and each f_i squarefree."""
    p = [Fraction(c) for c in coeffs]
    if len(p) == 1:
        return []
    out = []
    g = _pgcd(p, _deriv(p))
    w = _pdivmod(p, g)[0]
    k = 1
    while len(w) > 1:
        y = _pgcd(w, g)
        f = _pdivmod(w, y)[0]
        if len(f) > 1:
            out.append((f, k))
        w, g = y, _pdivmod(g, y)[0]
        k += 1
    return out


def charpoly_roots(matrix, dps: int = 50) -> np.ndarray:
    """Roots of the exact characteristic polynomial, with multiplicity.

    Repeated roots are split off exactly first, so the numerical root finder
    only ever sees squarefree factors.
    """
    import mpmath

    roots = []
    with mpmath.workdps(dps):
        for f, mult in squarefree_factors(charpoly_exact(matrix)):
            if len(f) == 2:
                rs = [-mpmath.mpf(f[1].numerator) / f[1].denominator]
            else:
                rs = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in f], maxsteps=400, extraprec=4 * dps)
            roots += [complex(r) for r in rs] * mult
    return np.array(roots, dtype=complex)


def match_multisets(x, y, tol: float):
    """Optimal one-to-one matching of two complex multisets; returns (max distance, pairs)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if len(x) != len(y):
        return math.inf, []
    if len(x) == 0:
        return 0.0, []
    cost = np.abs(x[:, None] - y[None, :])
    r, c = linear_sum_assignment(cost)
    d = cost[r, c]
    return float(d.max()), [(x[i], y[j]) for i, j in zip(r, c) if cost[i, j] > tol]


def cluster_means_match(x, y, tol: float, radius: float = 1e-4) -> float:
    """Compare two multisets after replacing each cluster by its mean.

    Jordan blocks split a k-fold eigenvalue into a ring of radius ~eps^(1/k);
    the cluster mean is still accurate to roughly eps.
    """
    cx, cy = cluster(x, radius), cluster(y, radius)
    ex = np.repeat([c for c, _ in cx], [m for _, m in cx])
    ey = np.repeat([c for c, _ in cy], [m for _, m in cy])
    return match_multisets(ex, ey, tol)[0]


# ---------------------------------------------------------------- operator-level reports


@dataclass
class MultisetReport:
    n: int
    ok: bool
    max_distance: float
    lhs: np.ndarray
    rhs: np.ndarray
    detail: dict = field(default_factory=dict)

    def diff(self, tol=1e-6):
        return match_multisets(self.lhs, self.rhs, tol)[1]


def tjb_consistency(n: int, tol: float = 1e-6, space: str = "full") -> MultisetReport:
    """{2 lam + 1/lam : lam in spec T+} against {-3 mu : mu in spec J+B+}."""
    from .operators import even_operators

    ops = even_operators(n, space)
    lam = eigvals_raw(ops["T+"])
    mu = eigvals_raw(ops["J+"] @ ops["B+"])
    lhs, rhs = 2 * lam + 1 / lam, -3 * mu
    dist = cluster_means_match(lhs, rhs, tol)
    return MultisetReport(n, dist <= tol, dist, lhs, rhs)


def _restricted(op, basis) -> np.ndarray:
    """Matrix of op on span(basis) (basis invariant under op), Gram-weighted least squares."""
    v = np.asarray(basis, dtype=float)
    g = op.weights.astype(float)
    lhs = v.T @ (g[:, None] * v)
    return np.linalg.solve(lhs, v.T @ (g[:, None] * (op.to_float() @ v)))


def abt_roots(b: float) -> tuple[complex, complex]:
    """The two eigenvalues 1/4 (-3b +- sqrt(9b^2 - 8)) attached to an eigenvalue b of B+."""
    root = np.sqrt(complex(9 * b * b - 8))
    return (-3 * b + root) / 4, (-3 * b - root) / 4


def abt_prediction(n: int, tol: float = 1e-6, space: str = "full") -> MultisetReport:
    """Predict the spectrum of T+ on N+ from the spectrum of B+ on the J = +1 part of N+."""
    from .operators import even_operators, knr_decomposition

    ops = even_operators(n, space)
    dec = knr_decomposition(n, space, ops)
    npp, npm = dec.N_pp.shape[1], dec.N_pm.shape[1]
    if dec.N_plus.shape[1] == 0:
        return MultisetReport(n, npp == npm, 0.0, np.zeros(0, complex), np.zeros(0, complex), {"dims": (npp, npm)})
    actual = eigvals_raw(_restricted(ops["T+"], dec.N_plus))
    bvals = eigvals_raw(_restricted(ops["B+"], dec.N_pp)).real
    predicted = np.array([r for b in bvals for r in abt_roots(b)])
    dist = cluster_means_match(predicted, actual, tol)
    detail = {"dims": (npp, npm), "b": np.sort(bvals)}
    return MultisetReport(n, dist <= tol and npp == npm, dist, predicted, actual, detail)
