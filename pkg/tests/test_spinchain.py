import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from adelic_lab import spinchain as sc
from adelic_lab.modular import sieve_tables


def test_h_small_values():
    assert sc.h_value(()) == 1
    assert sc.h_value((1,)) == 2
    assert sc.h_value((0, 1)) == 3
    assert sc.h_value((1, 1)) == 3
    assert sc.h_value((1, 0, 0)) == 2  # trailing zeros do not change h


@given(st.lists(st.integers(0, 1), max_size=16))
def test_h_table_matches_recursion(bits):
    k = len(bits)
    idx = sum(b << i for i, b in enumerate(bits))
    assert sc.h_table(k)[idx] == sc.h_value(bits)


def test_stern_k1_excludes_ground_state():
    # words of length 0 give the single pair (1, 1); the ground state adds h = 1
    assert np.flatnonzero(sc._stern_counts(1)).tolist() == [2]
    assert sc.enumerate_h(1).as_dict() == {1: 1, 2: 1}


@pytest.mark.parametrize("k", range(0, 15))
def test_stern_equals_table(k):
    e = sc.enumerate_h(k)
    assert e.as_dict() == sc.h_multiset_from_table(k).as_dict()
    assert e.total == 2**k
    assert int(e.values.max()) == sc.fibonacci(k + 2)


def test_partition_function_converges():
    ref = sc.Z_limit(3)
    z10, z20 = sc.Z_k(10, 3).real, sc.Z_k(20, 3).real
    assert abs(z20 - ref) < 0.01
    assert abs(z20 - ref) < abs(z10 - ref)
    assert ref == pytest.approx(float(mpmath.zeta(2) / mpmath.zeta(3)), rel=1e-13)


def test_twisted_k1_value():
    assert sc.Z_tilde_k(1, 3).real == pytest.approx(0.875)


def test_twisted_decreases_at_two():
    vals = [abs(sc.Z_tilde_k(k, 2)) for k in (10, 14, 18)]
    assert vals[0] > vals[1] > vals[2]


def test_twisted_trend_at_three():
    target = sc.Z_tilde_limit(3)
    assert target == pytest.approx(float(mpmath.zeta(3) * mpmath.zeta(4) / (mpmath.zeta(2) * mpmath.zeta(6))), rel=1e-12)
    assert abs(sc.Z_tilde_k(20, 3) - target) < abs(sc.Z_tilde_k(8, 3) - target)


@given(st.floats(1.2, 8), st.floats(-30, 30))
def test_zeta_against_mpmath(re, im):
    s = complex(re, im)
    assert abs(sc.zeta(s) - complex(mpmath.zeta(s))) <= 1e-10 * max(1.0, abs(complex(mpmath.zeta(s))))


def test_zeta_pole():
    with pytest.raises(ValueError):
        sc.zeta(1)


def test_n_of_k():
    assert sc.N_of_k(4) == 7


def test_hat_approx_coefficients():
    t = sieve_tables(50)
    h = sc.hat_approx(50)
    assert h.values.tolist() == list(range(1, 51))
    assert all(h.coeffs[n - 1] == t.liouville[n] * t.phi[n] for n in range(1, 51))


def test_on_grid_matches_pointwise():
    approx = sc.twisted(sc.enumerate_h(8))
    grid = np.array([[1.5 + 2j, 2.0], [1.7 - 3j, 3 + 14j]])
    vals = approx.on_grid(grid)
    assert all(abs(vals[i, j] - approx(grid[i, j])) < 1e-12 for i in range(2) for j in range(2))


def test_interaction_k1():
    assert sc.interaction_j(1, (1,)) == pytest.approx(math.log(2) / 2)


def test_interaction_direct_sum_k2():
    t = (1, 0)
    direct = -sum(math.log(sc.h_value(g)) * (-1) ** (g[0] * t[0] + g[1] * t[1]) for g in itertools.product((0, 1), repeat=2)) / 4
    assert sc.interaction_j(2, t) == pytest.approx(direct)
    assert direct > 0


def test_interaction_rejects_zero_config():
    with pytest.raises(ValueError):
        sc.interaction_j(4, (0, 0))


def test_strip_scan_shapes_and_budget():
    scan = sc.strip_scan(10, grid=(30, 20))
    assert scan.z_tilde.shape == scan.z_hat.shape == (20, 30)
    assert set(scan.flagged) == {1.5 + 14.1j, 1.5 + 21.0j}
    with pytest.raises(ValueError):
        sc.strip_scan(10, grid=(500, 10))


def test_parse_config():
    assert sc.parse_config("1,0,1") == (1, 0, 1)
    with pytest.raises(ValueError):
        sc.parse_config("102")


@given(st.floats(2.05, 8))
def test_z_k_nondecreasing_in_k(s):
    vals = [sc.Z_k(k, s).real for k in range(0, 16)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
