"""Finite-n spectral invariants over 2 <= n <= 40."""

import math

import numpy as np
import pytest

from adelic_lab import eigen, oldnew
from adelic_lab.modular import divisors, jordan_j2
from adelic_lab.operators import build_T, build_t_tilde, even_operators, parity_split


def _conjugation_closed(values, tol=1e-6):
    return eigen.match_multisets(values, np.conj(values), tol)[0] <= tol


@pytest.mark.parametrize("n", range(2, 41))
def test_sweep(n):
    plus, minus = parity_split(build_T(n))
    sp = eigen.classify(eigen.eigenvalues(plus))
    nonreal = sp.values[np.abs(sp.values.imag) > 1e-6]
    assert np.all(np.abs(np.abs(nonreal) - 1 / math.sqrt(2)) <= 1e-6)
    assert sp.tag_counts()["Other"] == 0
    assert sp.multiplicity(1.0) == len(divisors(n))
    assert _conjugation_closed(sp.values)
    if minus.dim:
        vm = eigen.eigvals_raw(minus)
        assert np.abs(vm).max() <= math.sqrt(3) / 2 + 1e-8
        assert _conjugation_closed(vm)
    tilde_plus, _ = parity_split(build_t_tilde(n))
    assert eigen.eigenvalues(tilde_plus).multiplicity(1.0) == 1


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_odd_singular_value(n):
    e = even_operators(n)
    s = np.linalg.svd(e["T-"].to_float(), compute_uv=False)
    y = np.linalg.svd(e["Yp-"].to_float(), compute_uv=False)
    assert s.max() ** 2 == pytest.approx(0.75 * y.max(), abs=1e-8)


def test_aggregate_even_tags_at_50():
    sp = eigen.classify(oldnew.assemble_frak_t(50, "+").spectrum())
    counts = sp.tag_counts()
    assert counts["Other"] == 0
    assert counts["Zero"] == counts["MinusOne"] == 0
    pairs, unpaired = eigen.circle_inversion_pairs(sp)
    assert pairs and not unpaired


@pytest.mark.parametrize("n", [31, 37, 40])
def test_stratification_large_n(n):
    assert oldnew.stratify(n).sizes() == {d: jordan_j2(n // d) for d in divisors(n)}


def test_j2_sum_to_60():
    assert all(oldnew.j2_divisor_sum(n) == n * n for n in range(1, 61))
