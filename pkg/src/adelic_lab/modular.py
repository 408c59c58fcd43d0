"""Residue arithmetic mod n: Lambda(n), SL(2, Z/nZ) and multiplicative sieves."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod

import numpy as np

SL2_CAP = 60


class SizeLimitError(ValueError):
    """Raised when an enumeration would exceed a configured cap."""


@dataclass(frozen=True, order=True)
class LatticePoint:
    """A pair (a, b) of least non-negative residues mod n."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("modulus must be >= 1")
        if not (0 <= self.a < self.n and 0 <= self.b < self.n):
            raise ValueError(f"({self.a}, {self.b}) is not reduced mod {self.n}")

    @classmethod
    def reduce(cls, a: int, b: int, n: int) -> "LatticePoint":
        return cls(a % n, b % n, n)

    @property
    def index(self) -> int:
        """Position in the lexicographic basis of (Z/nZ)^2."""
        return self.a * self.n + self.b

    def __neg__(self):
        return LatticePoint.reduce(-self.a, -self.b, self.n)


@dataclass(frozen=True)
class GroupElement:
    """A matrix [[a, b], [c, d]] with entries mod n and determinant 1."""

    a: int
    b: int
    c: int
    d: int
    n: int

    def __post_init__(self):
        if (self.a * self.d - self.b * self.c - 1) % self.n:
            raise ValueError("determinant is not 1 mod n")

    @classmethod
    def reduce(cls, a, b, c, d, n) -> "GroupElement":
        return cls(a % n, b % n, c % n, d % n, n)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        n = self.n
        return GroupElement.reduce(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            n,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement.reduce(self.d, -self.b, -self.c, self.a, self.n)

    def __neg__(self):
        return GroupElement.reduce(-self.a, -self.b, -self.c, -self.d, self.n)

    def act(self, x: LatticePoint) -> LatticePoint:
        return LatticePoint.reduce(self.a * x.a + self.b * x.b, self.c * x.a + self.d * x.b, self.n)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass
class SieveTables:
    """Per-integer arithmetic functions on 0..N (index 0 unused)."""

    N: int
    spf: np.ndarray
    phi: np.ndarray
    liouville: np.ndarray
    jordan2: np.ndarray
    dedekind_psi: np.ndarray
    sigma0: np.ndarray


def sieve_tables(N: int) -> SieveTables:
    """Linear sieve over smallest prime factors, filling phi, lambda, J2, psi, sigma0."""
    if N < 1:
        raise ValueError("sieve bound must be >= 1")
    spf = np.zeros(N + 1, dtype=np.int64)
    primes: list[int] = []
    for i in range(2, N + 1):
        if spf[i] == 0:
            spf[i] = i
            primes.append(i)
        for p in primes:
            if p > spf[i] or i * p > N:
                break
            spf[i * p] = p

    phi = np.zeros(N + 1, dtype=np.int64)
    liou = np.zeros(N + 1, dtype=np.int64)
    j2 = np.zeros(N + 1, dtype=np.int64)
    psi = np.zeros(N + 1, dtype=np.int64)
    sig = np.zeros(N + 1, dtype=np.int64)
    phi[1] = liou[1] = j2[1] = psi[1] = sig[1] = 1
    for m in range(2, N + 1):
        p = int(spf[m])
        rest = m // p
        e = 1
        while rest % p == 0:
            rest //= p
            e += 1
        pk = m // rest
        phi[m] = phi[rest] * (pk - pk // p)
        j2[m] = j2[rest] * (pk * pk - (pk // p) ** 2)
        psi[m] = psi[rest] * (pk + pk // p)
        sig[m] = sig[rest] * (e + 1)
        liou[m] = -liou[m // p]
    return SieveTables(N, spf, phi, liou, j2, psi, sig)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; only meant for the small moduli used here."""
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def jordan_j2(n: int) -> int:
    return n * n * prod(p * p - 1 for p in factorize(n)) // prod(p * p for p in factorize(n))


def sl2_order(n: int) -> int:
    """|SL(2, Z/nZ)| from the prime-power product formula."""
    return prod(p ** (3 * k - 2) * (p * p - 1) for p, k in factorize(n).items())


def in_lambda(a: int, b: int, n: int) -> bool:
    return gcd(gcd(a, b), n) == 1


def enumerate_lambda(n: int) -> list[LatticePoint]:
    """Points of (Z/nZ)^2 with gcd(a, b, n) = 1, lexicographic."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    return [LatticePoint(a, b, n) for a in range(n) for b in range(n) if in_lambda(a, b, n)]


def enumerate_sl2(n: int, cap: int = SL2_CAP) -> list[GroupElement]:
    """All determinant-one matrices mod n, lexicographic in (a, b, c, d)."""
    return [GroupElement(*map(int, row), n) for row in sl2_array(n, cap)]


def sl2_array(n: int, cap: int = SL2_CAP) -> np.ndarray:
    """SL(2, Z/nZ) as an (|G|, 4) int64 array of rows (a, b, c, d), lexicographic."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    if n > cap:
        raise SizeLimitError(f"SL(2, Z/{n}Z) has {sl2_order(n)} elements; cap is n <= {cap}")
    a, b, c = (g.ravel() for g in np.meshgrid(*(np.arange(n, dtype=np.int64),) * 3, indexing="ij"))
    chunks = []
    for d in range(n):
        hit = (a * d - b * c - 1) % n == 0
        chunks.append(np.stack([a[hit], b[hit], c[hit], np.full(hit.sum(), d, dtype=np.int64)], axis=1))
    out = np.concatenate(chunks)
    order = np.lexsort((out[:, 3], out[:, 2], out[:, 1], out[:, 0]))
    return out[order]


def gcd_stratum(x: LatticePoint) -> int:
    """The divisor d = gcd(a, b, n); x lies in d * Lambda(n/d)."""
    return gcd(gcd(x.a, x.b), x.n)
