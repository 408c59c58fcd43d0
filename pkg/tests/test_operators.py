from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adelic_lab import eigen
from adelic_lab.acceptance import identity_suite
from adelic_lab.modular import LatticePoint, jordan_j2
from adelic_lab.operators import (
    ContractViolation,
    build_generator,
    build_T,
    build_t_tilde,
    build_Y_plus,
    even_operators,
    involution_split,
    knr_decomposition,
    negation_indices,
    parity_dims,
    parity_split,
    permutation_indices,
    restrict_to_lambda,
)


def test_t2_exact_matrix():
    t = build_T(2)
    assert t.den == 2
    assert np.array_equal(t.num, [[2, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]])


def test_t_tilde_2_is_column_stochastic():
    t = build_t_tilde(2)
    assert t.dim == 3
    # column x spreads mass to L x and R x, so the chain (transpose) has row sums 1
    assert np.all(t.num.sum(axis=0) == t.den)


def test_generator_acts_on_points():
    n = 7
    idx = permutation_indices(n, "L")
    for a in range(n):
        for b in range(n):
            img = idx[a * n + b]
            assert divmod(int(img), n) == ((a + b) % n, b)
    idx = permutation_indices(n, "R")
    assert divmod(int(idx[3 * n + 5]), n) == (3, 1)


def test_y_plus_idempotent_n3():
    y = build_Y_plus(3)
    # 36 Y^2 = 36 Y over the integers
    assert np.array_equal((y @ y).num * (36 // (y @ y).den), y.num * (36 // y.den))


@pytest.mark.parametrize("n", range(1, 9))
def test_identity_suite(n):
    failed = [k for k, ok in identity_suite(n).items() if not ok]
    assert not failed


def test_parity_dims_examples():
    assert parity_dims(2) == (4, 0)
    assert parity_dims(3) == (5, 4)
    for n in range(1, 13):
        plus, minus = parity_split(build_T(n))
        assert (plus.dim, minus.dim) == parity_dims(n)


def test_parity_split_preserves_spectrum_n3():
    t = build_T(3)
    plus, minus = parity_split(t)
    full = eigen.eigvals_raw(t)
    parts = np.concatenate([eigen.eigvals_raw(plus), eigen.eigvals_raw(minus)])
    d, _ = eigen.match_multisets(full, parts, 1e-7)
    assert d <= 1e-7


def _dense(op):
    return op.num.astype(object) * Fraction(1, op.den)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 9), st.sampled_from(["L", "R", "J", "Linv"]))
def test_involution_split_round_trip(n, word):
    """S^-1 M S reproduces the split matrix, where S holds the +/- basis vectors."""
    op = build_T(n) if word == "J" else build_generator(n, word) + build_T(n)
    split = involution_split(op, negation_indices(op.basis))
    s = np.hstack([split.plus_vectors, split.minus_vectors]).astype(float)
    m = op.to_float()
    lhs = s @ split.full.to_float()
    assert np.allclose(lhs, m @ s, atol=1e-12)


def test_involution_split_rejects_non_commuting_parity():
    # doubling one column of L breaks the symmetry under x -> -x
    op = build_generator(3, "L")
    num = op.num.copy()
    num[:, 1] *= 2
    bad = type(op)(num, 1, op.basis, op.n)
    with pytest.raises(ContractViolation):
        parity_split(bad)


def test_restriction_requires_invariance():
    op = build_T(4)
    num = op.num.copy()
    num[0, 1] = 1  # couple the origin to a primitive point
    with pytest.raises(ContractViolation):
        restrict_to_lambda(type(op)(num, op.den, op.basis, op.n))


def test_t_plus_and_j_plus_do_not_commute_n3():
    e = even_operators(3)
    assert e["T+"] @ e["J+"] != e["J+"] @ e["T+"]


def test_knr_dimensions():
    d = knr_decomposition(3).dims()
    assert (d["K_plus"], d["R_plus"], d["N_plus"]) == (1, 2, 2)
    assert d["N_pp"] == d["N_pm"] == 1
    d2 = knr_decomposition(2).dims()
    assert d2["R_plus"] >= 2
    for n in range(2, 9):
        d = knr_decomposition(n).dims()
        assert d["K_plus"] + d["R_plus"] + d["N_plus"] == parity_dims(n)[0]
        assert d["N_pp"] == d["N_pm"]


def test_t_tilde_dimension():
    for n in range(1, 16):
        assert build_t_tilde(n).dim == jordan_j2(n)


def test_adjoint_is_transpose_for_permutations():
    g = build_generator(5, "L")
    assert g.adjoint() == build_generator(5, "Linv")
    assert g @ g.adjoint() == g.identity_like()


def test_basis_labels():
    t = build_t_tilde(4)
    assert all(isinstance(x, LatticePoint) and x.n == 4 for x in t.basis)


def _compose(*words, n):
    """Index map of the product w1 w2 ... (rightmost acts first)."""
    idx = np.arange(n * n)
    for w in reversed(words):
        idx = permutation_indices(n, w)[idx]
    return idx


@pytest.mark.parametrize("n", range(1, 25))
def test_hexagon_and_order_three_to_24(n):
    j = permutation_indices(n, "J")
    assert np.array_equal(j, _compose("L", "Rinv", "L", n=n))
    assert np.array_equal(j, _compose("Rinv", "L", "Rinv", n=n))
    assert np.array_equal(j, _compose("I", "Linv", "R", "Linv", n=n))
    i = permutation_indices(n, "I")
    assert np.array_equal(i, _compose(*["Rinv", "L"] * 3, n=n))
    assert np.array_equal(i, _compose(*["Linv", "R"] * 3, n=n))
