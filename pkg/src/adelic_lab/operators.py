"""Exact matrices of L, R, J, I, T, Y+-, A, B on (Z/nZ)^2 and their splittings.

Every operator is stored as an integer numerator matrix over a positive
integer denominator. Basis vectors are indicator functions of points, so the
standard basis is orthonormal; split bases (parity, J) use unnormalised
integer vectors whose squared lengths are kept in ``gram``.

Convention: the permutation operator of O sends the indicator of x to the
indicator of O x, i.e. (O f)(x) = f(O^-1 x). Column x of 2T therefore holds
one unit at L x and one at R x, which is the transition rule of the chain.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from . import exact
from .modular import LatticePoint, in_lambda


class ContractViolation(RuntimeError):
    """An exact structural check failed (would indicate a convention bug)."""


GENERATORS = {
    "L": (1, 1, 0, 1),
    "R": (1, 0, 1, 1),
    "Linv": (1, -1, 0, 1),
    "Rinv": (1, 0, -1, 1),
    "J": (0, 1, -1, 0),
    "I": (-1, 0, 0, -1),
}
_ALIASES = {"L^-1": "Linv", "L-1": "Linv", "R^-1": "Rinv", "R-1": "Rinv"}


@dataclass(frozen=True)
class ScaledIntegerOperator:
    """The operator ``num / den`` on a labelled basis."""

    num: np.ndarray
    den: int
    basis: tuple
    n: int
    gram: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if self.num.shape != (len(self.basis), len(self.basis)):
            raise ValueError("numerator shape does not match the basis")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def weights(self) -> np.ndarray:
        return np.ones(self.dim, dtype=np.int64) if self.gram is None else self.gram

    def reduced(self) -> "ScaledIntegerOperator":
        g = int(np.gcd.reduce(np.abs(self.num).ravel(), initial=0)) if self.num.size else 0
        g = gcd(g, self.den)
        if g <= 1:
            return self
        return replace(self, num=self.num // g, den=self.den // g)

    def _like(self, num, den) -> "ScaledIntegerOperator":
        return replace(self, num=num, den=den).reduced()

    def _check(self, other):
        if self.basis != other.basis:
            raise ValueError("operators live on different bases")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.identity_like() * other
        self._check(other)
        d = lcm(self.den, other.den)
        return self._like(self.num * (d // self.den) + other.num * (d // other.den), d)

    __radd__ = __add__

    def __neg__(self):
        return replace(self, num=-self.num)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        s = Fraction(scalar)
        return self._like(self.num * s.numerator, self.den * s.denominator)

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return self._like(self.num @ other.num, self.den * other.den)

    def __eq__(self, other):
        if not isinstance(other, ScaledIntegerOperator):
            return NotImplemented
        return self.basis == other.basis and np.array_equal(self.num * other.den, other.num * self.den)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.num.any()

    def identity_like(self):
        return replace(self, num=np.eye(self.dim, dtype=np.int64), den=1)

    def adjoint(self):
        """Matrix of the Hilbert-space adjoint: G^-1 M^T G for the diagonal Gram G."""
        w = self.weights
        if np.all(w == w[0]):
            return replace(self, num=self.num.T.copy())
        m = lcm(*map(int, w))
        num = self.num.T * (w[None, :] * (m // w)[:, None])
        return self._like(num, self.den * m)

    def to_float(self) -> np.ndarray:
        return self.num.astype(float) / self.den

    def power(self, k: int):
        out = self.identity_like()
        for _ in range(k):
            out = out @ self
        return out

    def reorder(self, order) -> "ScaledIntegerOperator":
        """Same operator on a permuted basis: new position i holds old index order[i]."""
        order = np.asarray(order)
        gram = None if self.gram is None else self.gram[order]
        return replace(self, num=self.num[np.ix_(order, order)], basis=tuple(self.basis[i] for i in order), gram=gram)


def full_basis(n: int) -> tuple:
    return tuple(LatticePoint(a, b, n) for a in range(n) for b in range(n))


def _point_arrays(n):
    a, b = np.divmod(np.arange(n * n), n)
    return a, b


def permutation_indices(n: int, which: str) -> np.ndarray:
    """Index map x -> O x on the lexicographic basis of (Z/nZ)^2."""
    which = _ALIASES.get(which, which)
    p, q, r, s = GENERATORS[which]
    a, b = _point_arrays(n)
    return ((p * a + q * b) % n) * n + (r * a + s * b) % n


def build_generator(n: int, which: str) -> ScaledIntegerOperator:
    if n < 1:
        raise ValueError("modulus must be >= 1")
    img = permutation_indices(n, which)
    num = np.zeros((n * n, n * n), dtype=np.int64)
    num[img, np.arange(n * n)] = 1
    return ScaledIntegerOperator(num, 1, full_basis(n), n)


def build_T(n: int) -> ScaledIntegerOperator:
    """T = (L + R) / 2."""
    return (build_generator(n, "L") + build_generator(n, "R")) * Fraction(1, 2)


def build_Y_plus(n: int) -> ScaledIntegerOperator:
    """Y+ = (3 - I + 2 R^-1 L + 2 L^-1 R) / 6, the projection with 8 T*T = 1 + I + 6 Y+."""
    g = {w: build_generator(n, w) for w in ("L", "R", "Linv", "Rinv", "I")}
    one = g["I"].identity_like()
    return (3 * one - g["I"] + 2 * (g["Rinv"] @ g["L"]) + 2 * (g["Linv"] @ g["R"])) * Fraction(1, 6)


def build_Y_minus(n: int) -> ScaledIntegerOperator:
    j = build_generator(n, "J")
    return j.adjoint() @ build_Y_plus(n) @ j


def build_A(n: int) -> ScaledIntegerOperator:
    return build_Y_plus(n) - build_Y_minus(n)


def build_B(n: int) -> ScaledIntegerOperator:
    yp, ym = build_Y_plus(n), build_Y_minus(n)
    return yp.identity_like() - yp - ym


def lambda_indices(n: int) -> np.ndarray:
    a, b = _point_arrays(n)
    return np.flatnonzero(np.gcd(np.gcd(a, b), n) == 1)


def restrict_to_lambda(op: ScaledIntegerOperator) -> ScaledIntegerOperator:
    """Restriction to functions supported on Lambda(n)."""
    n = op.n
    if op.basis != full_basis(n):
        raise ValueError("restriction needs the full (Z/nZ)^2 basis")
    inside = lambda_indices(n)
    outside = np.setdiff1d(np.arange(n * n), inside)
    if op.num[np.ix_(outside, inside)].any() or op.num[np.ix_(inside, outside)].any():
        raise ContractViolation(f"operator does not preserve Lambda({n})")
    return replace(op, num=op.num[np.ix_(inside, inside)], basis=tuple(op.basis[i] for i in inside))


def build_t_tilde(n: int) -> ScaledIntegerOperator:
    return restrict_to_lambda(build_T(n))


def negation_indices(basis) -> np.ndarray:
    pos = {x: i for i, x in enumerate(basis)}
    return np.array([pos[-x] for x in basis])


@dataclass
class InvolutionSplit:
    """Matrix of an operator in the (+1 | -1) eigenbasis of a basis involution."""

    full: ScaledIntegerOperator
    plus_dim: int
    plus_vectors: np.ndarray  # columns, coordinates in the original basis
    minus_vectors: np.ndarray

    @property
    def blocks(self):
        k = self.plus_dim
        m = self.full.num
        return m[:k, :k], m[:k, k:], m[k:, :k], m[k:, k:]

    def commutes(self) -> bool:
        _, pm, mp, _ = self.blocks
        return not pm.any() and not mp.any()

    def _block(self, sl):
        op = self.full
        return ScaledIntegerOperator(op.num[sl, sl].copy(), op.den, op.basis[sl], op.n, op.weights[sl].copy()).reduced()

    @property
    def plus(self) -> ScaledIntegerOperator:
        return self._block(slice(0, self.plus_dim))

    @property
    def minus(self) -> ScaledIntegerOperator:
        return self._block(slice(self.plus_dim, self.full.dim))


def involution_split(op: ScaledIntegerOperator, perm, tags=("+", "-")) -> InvolutionSplit:
    """Rewrite ``op`` in the basis e_x + e_px (or e_x if fixed) / e_x - e_px.

    ``perm`` must be an involution of basis indices that preserves the Gram
    weights. Works whether or not ``op`` commutes with it; when it does the
    off-diagonal blocks vanish.
    """
    perm = np.asarray(perm)
    d = op.dim
    if not np.array_equal(perm[perm], np.arange(d)):
        raise ValueError("permutation is not an involution")
    w = op.weights
    if not np.array_equal(w[perm], w):
        raise ValueError("involution does not preserve the Gram weights")
    idx = np.arange(d)
    fixed = perm == idx
    reps_plus = idx[perm >= idx]
    reps_minus = idx[perm > idx]
    pair_p = ~fixed[reps_plus]

    m = op.num
    cols_p = m[:, reps_plus] + np.where(pair_p[None, :], m[:, perm[reps_plus]], 0)
    cols_m = m[:, reps_minus] - m[:, perm[reps_minus]]
    v = np.concatenate([cols_p, cols_m], axis=1)
    # coordinates: along e_r + e_pr -> (v_r + v_pr)/2 ; along e_r (fixed) -> v_r
    rows_p = np.where(pair_p[:, None], v[reps_plus] + v[perm[reps_plus]], 2 * v[reps_plus])
    rows_m = v[reps_minus] - v[perm[reps_minus]]
    num = np.concatenate([rows_p, rows_m], axis=0)

    labels = tuple((tags[0], op.basis[i]) for i in reps_plus) + tuple((tags[1], op.basis[i]) for i in reps_minus)
    gram = np.concatenate([w[reps_plus] * np.where(pair_p, 2, 1), 2 * w[reps_minus]])
    full = ScaledIntegerOperator(num, 2 * op.den, labels, op.n, gram).reduced()

    sp = np.zeros((d, len(reps_plus)), dtype=np.int64)
    sp[reps_plus, np.arange(len(reps_plus))] = 1
    sp[perm[reps_plus], np.arange(len(reps_plus))] = 1
    sm = np.zeros((d, len(reps_minus)), dtype=np.int64)
    sm[reps_minus, np.arange(len(reps_minus))] = 1
    sm[perm[reps_minus], np.arange(len(reps_minus))] = -1
    return InvolutionSplit(full, len(reps_plus), sp, sm)


def parity_split(op: ScaledIntegerOperator):
    """(op+, op-) on the I = +1 / I = -1 subspaces."""
    neg = negation_indices(op.basis)
    split = involution_split(op, neg)
    if not split.commutes():
        raise ContractViolation("operator does not commute with the inversion I")
    return split.plus, split.minus


def parity_dims(n: int) -> tuple[int, int]:
    f = 1 if n % 2 else 4
    return (n * n + f) // 2, (n * n - f) // 2


def _perm_of(op: ScaledIntegerOperator) -> np.ndarray:
    """Index permutation of an operator whose matrix is a permutation matrix."""
    m = op.num
    if op.den != 1 or not (np.all((m == 0) | (m == 1)) and np.all(m.sum(0) == 1) and np.all(m.sum(1) == 1)):
        raise ContractViolation("operator is not a permutation")
    return np.argmax(m, axis=0)


def j_split_even(j_plus: ScaledIntegerOperator, op_plus: ScaledIntegerOperator, require_commuting=True):
    """Split an even-space operator along the J+ = +1 / -1 eigenspaces.

    For commuting inputs (B+, the edge Laplacian) returns the two diagonal
    blocks. With ``require_commuting=False`` (T+) the full InvolutionSplit is
    returned so the 2x2 block structure can be inspected.
    """
    perm = _perm_of(j_plus)
    if not np.array_equal(perm[perm], np.arange(len(perm))):
        raise ContractViolation("J+ is not an involution")
    split = involution_split(op_plus, perm, tags=("J+", "J-"))
    if require_commuting:
        if not split.commutes():
            raise ContractViolation("operator does not commute with J+")
        return split.plus, split.minus
    return split


def even_operators(n: int, space: str = "full") -> dict[str, ScaledIntegerOperator]:
    """Parity-even and parity-odd parts of the operator family at modulus n."""
    ops = {
        "T": build_T(n),
        "J": build_generator(n, "J"),
        "Yp": build_Y_plus(n),
        "Ym": build_Y_minus(n),
    }
    ops["Tadj"] = ops["T"].adjoint()
    ops["B"] = ops["Yp"].identity_like() - ops["Yp"] - ops["Ym"]
    ops["A"] = ops["Yp"] - ops["Ym"]
    if space == "lambda":
        ops = {k: restrict_to_lambda(v) for k, v in ops.items()}
    out = {}
    for k, v in ops.items():
        out[k + "+"], out[k + "-"] = parity_split(v)
    return out


@dataclass
class SubspaceDecomposition:
    """Integer bases (columns, even-space coordinates) of K+, R+, N+ and refinements."""

    n: int
    K_plus: np.ndarray
    R_plus: np.ndarray
    N_plus: np.ndarray
    K_pp: np.ndarray
    K_pm: np.ndarray
    R_pp: np.ndarray
    R_pm: np.ndarray
    N_pp: np.ndarray
    N_pm: np.ndarray
    K_minus: np.ndarray
    checks: dict = field(default_factory=dict)

    def dims(self) -> dict:
        return {k: v.shape[1] for k, v in vars(self).items() if isinstance(v, np.ndarray)}


def _apply(op: ScaledIntegerOperator, vecs: np.ndarray) -> np.ndarray:
    """op.num @ vecs with Python ints (exact)."""
    return np.asarray(op.num, dtype=object) @ np.asarray(vecs, dtype=object)


def _eigen_check(op, vecs, value: Fraction) -> bool:
    if vecs.shape[1] == 0:
        return True
    lhs = _apply(op, vecs) * value.denominator
    rhs = np.asarray(vecs, dtype=object) * (value.numerator * op.den)
    return bool(np.all(lhs == rhs))


def knr_decomposition(n: int, space: str = "full", ops=None) -> SubspaceDecomposition:
    """K = ker Y+ & ker Y-, R = ran Y+ & ran Y-, N = their complement (even part),
    refined by J+, plus K- on the odd part. All by exact integer elimination."""
    ops = ops or even_operators(n, space)
    yp, ym, jp = ops["Yp+"], ops["Ym+"], ops["J+"]
    one = np.eye(yp.dim, dtype=np.int64)
    K = exact.nullspace(np.vstack([yp.num, ym.num]))
    R = exact.nullspace(np.vstack([yp.num - yp.den * one, ym.num - ym.den * one]))
    G = np.diag(yp.weights).astype(object)
    KR = np.hstack([K, R])
    N = exact.nullspace(KR.T @ G) if KR.shape[1] else np.eye(yp.dim, dtype=object)
    jm = np.asarray(jp.num, dtype=object)
    eye = np.eye(jp.dim, dtype=object)

    def refine(V):
        if V.shape[1] == 0:
            return V, V
        return exact.column_basis((eye + jm) @ V), exact.column_basis((eye - jm) @ V)

    Kpp, Kpm = refine(K)
    Rpp, Rpm = refine(R)
    Npp, Npm = refine(N)
    ypm, ymm = ops["Yp-"], ops["Ym-"]
    Km = exact.nullspace(np.vstack([ypm.num, ymm.num]))

    tp, tm, tadjm = ops["T+"], ops["T-"], ops["Tadj-"]
    checks = {
        "dims_add_up": K.shape[1] + R.shape[1] + N.shape[1] == yp.dim,
        "T+ = -1/2 on K+,+": _eigen_check(tp, Kpp, Fraction(-1, 2)),
        "T+ = +1/2 on K+,-": _eigen_check(tp, Kpm, Fraction(1, 2)),
        "T+ = +1 on R+,+": _eigen_check(tp, Rpp, Fraction(1)),
        "T+ = -1 on R+,-": _eigen_check(tp, Rpm, Fraction(-1)),
        "T- = 0 on K-": _eigen_check(tm, Km, Fraction(0)),
        "T-* = 0 on K-": _eigen_check(tadjm, Km, Fraction(0)),
    }
    return SubspaceDecomposition(n, K, R, N, Kpp, Kpm, Rpp, Rpm, Npp, Npm, Km, checks)


def build_fourier(n: int) -> np.ndarray:
    """Unitary Fourier transform on (Z/nZ)^2, lexicographic basis."""
    a, b = _point_arrays(n)
    phase = (np.outer(a, a) + np.outer(b, b)) % n
    return np.exp(-2j * np.pi * phase / n) / n


def lambda_points(n: int) -> list[LatticePoint]:
    return [x for x in full_basis(n) if in_lambda(x.a, x.b, n)]
