"""Exact iteration of the counting chain (2 t(n))^k from the state (1, 0)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .modular import LatticePoint, in_lambda, sieve_tables

K_CAP = 120


@dataclass
class CountVector:
    n: int
    k: int
    counts: np.ndarray  # object array of Python ints, shape (n, n), indexed [a, b]

    @property
    def mass(self) -> int:
        return int(sum(self.counts.ravel()))

    def at(self, a: int, b: int) -> int:
        return int(self.counts[a % self.n, b % self.n])

    def support(self) -> list[LatticePoint]:
        a, b = np.nonzero(self.counts != 0)
        return [LatticePoint(int(x), int(y), self.n) for x, y in zip(a, b)]


def _step(c: np.ndarray, n: int) -> np.ndarray:
    """Push mass at x to L x = (a + b, b) and to R x = (a, a + b)."""
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    out = np.zeros_like(c)
    np.add.at(out, ((a + b) % n, b), c)
    np.add.at(out, (a, (a + b) % n), c)
    return out


def iterate(n: int, k: int, start=(1, 0)) -> CountVector:
    if n < 1:
        raise ValueError("modulus must be >= 1")
    if not 0 <= k <= K_CAP:
        raise ValueError(f"k must lie in [0, {K_CAP}]")
    c = np.zeros((n, n), dtype=object)
    c[start[0] % n, start[1] % n] = 1
    for _ in range(k):
        c = _step(c, n)
    return CountVector(n, k, c)


def iterate_all(n: int, k_max: int, start=(1, 0)) -> list[CountVector]:
    c = iterate(n, 0, start)
    out = [c]
    for k in range(1, k_max + 1):
        c = CountVector(n, k, _step(c.counts, n))
        out.append(c)
    return out


def _antidiagonal(cv: CountVector) -> int:
    n = cv.n
    return sum(int(cv.counts[a, (-a) % n]) for a in range(n) if in_lambda(a, (-a) % n, n))


def divisible_count(n: int, k: int) -> int:
    """Number of walks with a + b = 0 mod n after k steps, i.e. #{g : n | h_k(g)}."""
    return _antidiagonal(iterate(n, k))


@dataclass
class DeviationRow:
    k: int
    count: int
    expectation: Fraction
    deviation: Fraction
    sqrt_scale: float


def deviation_report(n: int, k_max: int) -> list[DeviationRow]:
    """count - 2^k / psi(n) against 2^(k/2), for k = 0..k_max."""
    psi = int(sieve_tables(max(n, 1)).dedekind_psi[n])
    rows = []
    for cv in iterate_all(n, k_max):
        count = _antidiagonal(cv)
        exp = Fraction(2**cv.k, psi)
        rows.append(DeviationRow(cv.k, count, exp, count - exp, 2 ** (cv.k / 2)))
    return rows


def fitted_constant(rows: list[DeviationRow]) -> float:
    """Smallest C with |deviation| <= C 2^(k/2) over the rows."""
    return max(abs(float(r.deviation)) / r.sqrt_scale for r in rows)


def markov_probability(n: int, k: int) -> Fraction:
    """Mass on the anti-diagonal of t(n)^k delta_(1,0), with exact rational steps of 1/2."""
    p = np.zeros((n, n), dtype=object)
    p[1 % n, 0] = Fraction(1)
    half = Fraction(1, 2)
    for _ in range(k):
        p = _step(p * half, n)
    return sum((p[a, (-a) % n] for a in range(n) if in_lambda(a, (-a) % n, n)), Fraction(0))
