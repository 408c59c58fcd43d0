"""gcd-strata of (Z/nZ)^2 and the direct sums of the new parts t~(k)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import eigen
from .config import map_jobs
from .modular import divisors, jordan_j2
from .operators import ContractViolation, build_T, build_t_tilde, parity_split

FRAK_CAP = 60


@dataclass
class StratifiedBasis:
    n: int
    strata: dict  # d -> indices into the lexicographic basis, ordered like Lambda(n/d)

    @property
    def order(self) -> np.ndarray:
        return np.concatenate([self.strata[d] for d in sorted(self.strata)])

    def sizes(self) -> dict:
        return {d: len(ix) for d, ix in sorted(self.strata.items())}


def stratify(n: int, check: bool = True) -> StratifiedBasis:
    """Split (Z/nZ)^2 into d * Lambda(n/d) and verify t(n) is block diagonal with blocks t~(n/d)."""
    if n < 1:
        raise ValueError("modulus must be >= 1")
    a, b = np.divmod(np.arange(n * n), n)
    g = np.gcd(np.gcd(a, b), n)
    # lexicographic order of (a, b) coincides with that of (a/d, b/d)
    strata = {d: np.flatnonzero(g == d) for d in divisors(n)}
    basis = StratifiedBasis(n, strata)
    if check:
        check_stratification(basis)
    return basis


def check_stratification(basis: StratifiedBasis, t=None):
    n = basis.n
    t = t or build_T(n)
    order = basis.order
    perm = t.num[np.ix_(order, order)]
    pos = 0
    mask = np.zeros_like(perm, dtype=bool)
    for d in sorted(basis.strata):
        k = len(basis.strata[d])
        blk = perm[pos : pos + k, pos : pos + k]
        ref = build_t_tilde(n // d)
        if not np.array_equal(blk * ref.den, ref.num * t.den):
            raise ContractViolation(f"stratum d={d} of t({n}) differs from t~({n // d})")
        mask[pos : pos + k, pos : pos + k] = True
        pos += k
    if perm[~mask].any():
        raise ContractViolation(f"t({n}) mixes gcd strata")
    return True


def _block(k: int, parity: str):
    plus, minus = parity_split(build_t_tilde(k))
    return plus if parity == "+" else minus


@lru_cache(maxsize=None)
def block_spectrum(k: int, parity: str) -> eigen.Spectrum:
    blk = _block(k, parity)
    return eigen.eigenvalues(blk, source={"n": k, "parity": parity, "subspace": "new"})


def _block_values(args):
    k, parity = args
    return eigen.eigvals_raw(_block(k, parity))


@dataclass
class AdelicBlockOperator:
    """frak t^{+-}(n) as the list of its blocks t~^{+-}(k), k <= n; never densified."""

    n_max: int
    parity: str
    jobs: int | None = None
    _values: dict = field(default_factory=dict, repr=False)

    @property
    def blocks(self):
        return [(k, self.parity) for k in range(1, self.n_max + 1)]

    def block(self, k: int):
        return _block(k, self.parity)

    def block_dims(self) -> dict:
        sign = 1 if self.parity == "+" else -1
        return {k: (jordan_j2(k) + sign * _fixed(k)) // 2 for k in range(1, self.n_max + 1)}

    def block_values(self, k: int) -> np.ndarray:
        if k not in self._values:
            self._fill([k])
        return self._values[k]

    def _fill(self, ks):
        todo = [k for k in ks if k not in self._values]
        if not todo:
            return
        if self.jobs and self.jobs > 1:
            vals = map_jobs(_block_values, [(k, self.parity) for k in todo], self.jobs)
        else:
            vals = [block_spectrum(k, self.parity).values for k in todo]
        self._values.update(zip(todo, vals))

    def spectrum(self, cluster_radius: float = 1e-6) -> eigen.Spectrum:
        ks = range(1, self.n_max + 1)
        self._fill(ks)
        vals = np.concatenate([self._values[k] for k in ks])
        return eigen.Spectrum(vals, eigen.cluster(vals, cluster_radius), None, {"n": self.n_max, "parity": self.parity, "subspace": "frak"})


def _fixed(k: int) -> int:
    """Number of x in Lambda(k) with 2x = 0."""
    if k == 1:
        return 1
    if k == 2:
        return 3
    return 0


def assemble_frak_t(n_max: int, parity: str, jobs: int | None = None) -> AdelicBlockOperator:
    if parity not in ("+", "-"):
        raise ValueError("parity must be '+' or '-'")
    if not 1 <= n_max <= FRAK_CAP:
        raise ValueError(f"n_max must lie in [1, {FRAK_CAP}]")
    return AdelicBlockOperator(n_max, parity, jobs)


def spectrum_included(small, large, tol: float = 1e-6) -> bool:
    """Is the multiset ``small`` contained in ``large`` (cluster counts, within tol)?"""
    cs = eigen.cluster(small, tol)
    big = np.asarray(large)
    for c, m in cs:
        if (np.abs(big - c) <= 10 * tol).sum() < m:
            return False
    return True


def lambda_p_mass(P: int) -> Fraction:
    """prod_{p <= P} (1 - p^-2)."""
    out = Fraction(1)
    for p in range(2, P + 1):
        if all(p % q for q in range(2, int(p**0.5) + 1)):
            out *= 1 - Fraction(1, p * p)
    return out


def j2_divisor_sum(n: int) -> int:
    return sum(jordan_j2(n // d) for d in divisors(n))
