import math
from fractions import Fraction

import numpy as np
import pytest

from adelic_lab import eigen, oldnew
from adelic_lab.modular import divisors, jordan_j2
from adelic_lab.operators import build_T, build_t_tilde


def test_strata_sizes_n6():
    assert oldnew.stratify(6).sizes() == {1: 24, 2: 8, 3: 3, 6: 1}


@pytest.mark.parametrize("n", range(1, 31))
def test_stratification_exact(n):
    basis = oldnew.stratify(n)
    assert sum(basis.sizes().values()) == n * n
    assert oldnew.j2_divisor_sum(n) == n * n


def test_t6_spectrum_is_union_of_blocks():
    full = eigen.eigvals_raw(build_T(6))
    parts = np.concatenate([eigen.eigvals_raw(build_t_tilde(k)) for k in divisors(6)])
    # t(6) has a nontrivial Jordan block at 0; compare cluster means
    assert eigen.cluster_means_match(full, parts, 1e-6) <= 1e-6


def test_small_aggregate_blocks():
    op = oldnew.assemble_frak_t(2, "+")
    assert op.block_dims() == {1: 1, 2: 3}
    assert oldnew.assemble_frak_t(2, "-").block_dims() == {1: 0, 2: 0}


def test_block_dims_add_up():
    for n in range(1, 25):
        p, m = oldnew.assemble_frak_t(n, "+").block_dims(), oldnew.assemble_frak_t(n, "-").block_dims()
        assert all(p[k] + m[k] == jordan_j2(k) for k in p)
        assert all(oldnew.block_spectrum(k, "+").dim == p[k] for k in range(1, min(n, 8) + 1))


def test_spectrum_inclusion_along_divisibility():
    small = oldnew.assemble_frak_t(6, "+").spectrum().values
    large = oldnew.assemble_frak_t(12, "+").spectrum().values
    assert oldnew.spectrum_included(small, large)
    assert not oldnew.spectrum_included(np.array([0.3 + 0.1j]), large)


def test_parallel_blocks_match_serial():
    a = oldnew.AdelicBlockOperator(14, "-").spectrum().values
    b = oldnew.AdelicBlockOperator(14, "-", jobs=2).spectrum().values
    assert np.array_equal(a, b)


def test_lambda_p_mass():
    m = oldnew.lambda_p_mass(97)
    assert abs(float(m) - 6 / math.pi**2) < 2e-3
    assert oldnew.lambda_p_mass(3) == Fraction(2, 3)


def test_odd_radius_small_aggregate():
    rho = oldnew.assemble_frak_t(20, "-").spectrum().radius()
    assert rho <= math.sqrt(3) / 2 + 1e-8


def test_lambda_p_mass_decreasing():
    vals = [oldnew.lambda_p_mass(P) for P in range(2, 60)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
