"""The number-theoretic spin chain: energies h_k, partition functions and
their Liouville-twisted versions, and interaction coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modular import sieve_tables

H_VALUE_CAP = 40
ENUM_CAP = 26
TABLE_CAP = 26
SPLIT_DEPTH = 8


# ---------------------------------------------------------------- h


@lru_cache(maxsize=None)
def _h(bits: tuple) -> int:
    while bits and bits[-1] == 0:
        bits = bits[:-1]
    if not bits:
        return 1
    prefix = bits[:-1]
    return _h(prefix) + _h(tuple(1 - b for b in prefix))


def h_value(g) -> int:
    """h(g) for a finite 0/1 configuration (g_1, ..., g_k); h(0) = 1."""
    g = tuple(int(b) for b in g)
    if any(b not in (0, 1) for b in g):
        raise ValueError("configuration entries must be 0 or 1")
    if len(g) > H_VALUE_CAP:
        raise OverflowError(f"configurations longer than {H_VALUE_CAP} are not supported")
    return _h(g)


def h_table(k: int) -> np.ndarray:
    """h_k(g) for all g in {0,1}^k, indexed by sum g_i 2^(i-1)."""
    if not 0 <= k <= TABLE_CAP:
        raise ValueError(f"k must lie in [0, {TABLE_CAP}]")
    h = np.ones(2**k, dtype=np.int64)
    for n in range(1, k + 1):
        half = 2 ** (n - 1)
        # last set bit at position n: prefix p and its complement (half - 1 - p)
        h[half : 2 * half] = h[:half] + h[:half][::-1]
    return h


def parse_config(bits: str) -> tuple:
    bits = bits.strip().replace(",", "").replace(" ", "")
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"not a 0/1 configuration: {bits!r}")
    return tuple(int(b) for b in bits)


# ---------------------------------------------------------------- multisets


@dataclass
class DirichletApprox:
    """Finite Dirichlet polynomial sum_v coeff[v] v^-s over distinct values v."""

    values: np.ndarray
    coeffs: np.ndarray

    @property
    def total(self) -> int:
        return int(np.abs(self.coeffs).sum())

    def __call__(self, s) -> complex:
        s = complex(s)
        return complex(np.sum(self.coeffs * np.exp(-s * np.log(self.values.astype(float)))))

    def on_grid(self, s_grid: np.ndarray, chunk: int = 256) -> np.ndarray:
        logv = np.log(self.values.astype(float))
        flat = np.asarray(s_grid, dtype=complex).ravel()
        out = np.empty(flat.shape, dtype=complex)
        for i in range(0, len(flat), chunk):
            out[i : i + chunk] = np.exp(-np.outer(flat[i : i + chunk], logv)) @ self.coeffs
        return out.reshape(np.shape(s_grid))

    def as_dict(self) -> dict:
        return {int(v): int(c) for v, c in zip(self.values, self.coeffs)}


def _stern_counts(k: int) -> np.ndarray:
    """counts[v] = #{L/R words of length < k applied to (1,1) with a + b = v}."""
    size = _fib(k + 2) + 1
    counts = np.zeros(size, dtype=np.int64)
    top = min(k, SPLIT_DEPTH)
    a = np.array([1], dtype=np.int64)
    b = np.array([1], dtype=np.int64)
    for _ in range(top):
        counts += np.bincount(a + b, minlength=size)
        a, b = np.r_[a + b, a], np.r_[b, a + b]
    # each remaining pair roots an independent subtree, expanded depth-first
    for a0, b0 in zip(a.tolist(), b.tolist()):
        sa, sb = np.array([a0]), np.array([b0])
        for _ in range(k - top):
            counts += np.bincount(sa + sb, minlength=size)
            sa, sb = np.r_[sa + sb, sa], np.r_[sb, sa + sb]
    return counts


@lru_cache(maxsize=None)
def _fib(m: int) -> int:
    a, b = 0, 1
    for _ in range(m):
        a, b = b, a + b
    return a


def fibonacci(m: int) -> int:
    return _fib(m)


@lru_cache(maxsize=8)
def _enumerate(k: int) -> DirichletApprox:
    counts = _stern_counts(k)
    counts[1] += 1  # the ground state g = 0
    v = np.flatnonzero(counts)
    return DirichletApprox(v, counts[v])


def enumerate_h(k: int) -> DirichletApprox:
    """Multiset {h_k(g) : g in {0,1}^k} from Stern pairs.

    The ground state g = 0 contributes h = 1; the 2^m words of length m in
    L: (a, b) -> (a + b, b) and R: (a, b) -> (a, a + b) applied to (1, 1)
    contribute a + b, for m = 0..k-1. Total multiplicity 1 + sum 2^m = 2^k.
    """
    if not 0 <= k <= ENUM_CAP:
        raise ValueError(f"k must lie in [0, {ENUM_CAP}]")
    return _enumerate(k)


def h_multiset_from_table(k: int) -> DirichletApprox:
    counts = np.bincount(h_table(k))
    v = np.flatnonzero(counts)
    return DirichletApprox(v, counts[v])


@lru_cache(maxsize=4)
def _liouville(bound: int) -> np.ndarray:
    return sieve_tables(bound).liouville


def twisted(approx: DirichletApprox) -> DirichletApprox:
    lam = _liouville(int(approx.values.max()))
    return DirichletApprox(approx.values, approx.coeffs * lam[approx.values])


def Z_k(k: int, s) -> complex:
    return enumerate_h(k)(s)


def Z_tilde_k(k: int, s) -> complex:
    return twisted(enumerate_h(k))(s)


def N_of_k(k: int) -> int:
    return math.floor(math.pi * math.sqrt(2**k / 3))


def hat_approx(N: int) -> DirichletApprox:
    """sum_{n <= N} lambda(n) phi(n) n^-s as a Dirichlet polynomial."""
    if N < 1:
        raise ValueError("N must be >= 1")
    t = sieve_tables(N)
    v = np.arange(1, N + 1)
    return DirichletApprox(v, t.liouville[1:] * t.phi[1:])


def Z_hat_N(N: int, s) -> complex:
    return hat_approx(N)(s)


# ---------------------------------------------------------------- zeta


_BERNOULLI = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330]


def zeta(s, N: int = 30) -> complex:
    """Riemann zeta by Euler-Maclaurin summation, for s != 1 with Re s > -10."""
    s = complex(s)
    if s == 1:
        raise ValueError("pole at s = 1")
    head = sum(n ** (-s) for n in range(1, N))
    tail = N ** (1 - s) / (s - 1) + N ** (-s) / 2
    rising = s
    power = N ** (-s - 1)
    fact = 2.0
    for j, b in enumerate(_BERNOULLI, start=1):
        tail += b / fact * rising * power
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= N * N
        fact *= (2 * j + 1) * (2 * j + 2)
    val = head + tail
    return val.real if s.imag == 0 else val


def Z_limit(s) -> complex:
    """zeta(s - 1) / zeta(s), the limit of Z_k for Re s > 2."""
    return zeta(s - 1) / zeta(s)


def Z_tilde_limit(s) -> complex:
    """zeta(s) zeta(2s - 2) / (zeta(s - 1) zeta(2s))."""
    return zeta(s) * zeta(2 * s - 2) / (zeta(s - 1) * zeta(2 * s))


# ---------------------------------------------------------------- strip scan


@dataclass
class StripScan:
    k: int
    re: np.ndarray
    im: np.ndarray
    z_tilde: np.ndarray  # |Z~_k| on the grid, shape (len(im), len(re))
    z_hat: np.ndarray
    maxima: list
    flagged: dict


def _local_maxima(field, re, im):
    out = []
    for i in range(1, field.shape[0] - 1):
        for j in range(1, field.shape[1] - 1):
            win = field[i - 1 : i + 2, j - 1 : j + 2]
            if field[i, j] == win.max() and (win < field[i, j]).sum() == 8:
                out.append(complex(re[j], im[i]))
    return out


def strip_scan(k: int, re=(1.4, 2.1), im=(0.0, 25.0), grid=(100, 100), targets=(1.5 + 14.1j, 1.5 + 21.0j), radius=1.0) -> StripScan:
    w, h = grid
    if not (1 <= w <= 400 and 1 <= h <= 400):
        raise ValueError("grid must be at most 400 x 400")
    xs = np.linspace(re[0], re[1], w)
    ys = np.linspace(im[0], im[1], h)
    s = xs[None, :] + 1j * ys[:, None]
    zt = np.abs(twisted(enumerate_h(k)).on_grid(s))
    zh = np.abs(hat_approx(N_of_k(k)).on_grid(s))
    maxima = _local_maxima(zt, xs, ys)
    flagged = {t: [m for m in maxima if abs(m - t) <= radius] for t in targets}
    return StripScan(k, xs, ys, zt, zh, maxima, flagged)


# ---------------------------------------------------------------- interaction


def _config_index(t) -> int:
    return sum(int(b) << i for i, b in enumerate(t))


def interaction_j(k: int, t) -> float:
    """-2^-k sum_g ln h_k(g) (-1)^<g, t> for a nonzero configuration t."""
    t = tuple(int(b) for b in t)
    if not any(t):
        raise ValueError("t must be nonzero")
    if len(t) > k and any(t[k:]):
        raise ValueError("support of t exceeds k")
    if k > 22:
        raise ValueError("k must be <= 22")
    logs = np.log(h_table(k).astype(float))
    x = np.arange(2**k)
    sign = np.zeros(2**k, dtype=np.int64)
    mask = _config_index(t[:k])
    for i in range(k):
        if mask >> i & 1:
            sign ^= (x >> i) & 1
    return float(-np.sum(logs * (1 - 2 * sign)) / 2**k)
