import itertools
import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.sparse.csgraph import shortest_path
from scipy.sparse.linalg import spsolve

from adelic_lab import tree


def test_vertex_count():
    assert tree.vertex_count(12) == 12286 == tree.build_tree(12).n_vertices


def test_star_spectrum():
    ev = tree.adjacency_spectrum(tree.build_tree(1), "dense")
    assert np.allclose(ev, [-math.sqrt(3), 0, 0, math.sqrt(3)])
    assert np.allclose(tree.reduced_spectrum(1), ev)


@pytest.mark.parametrize("depth", range(1, 9))
def test_reduced_spectrum_matches_dense(depth):
    dense = tree.adjacency_spectrum(tree.build_tree(depth), "dense")
    assert np.allclose(tree.reduced_spectrum(depth), dense, atol=1e-10)
    assert np.abs(dense).max() <= tree.SQRT8


def test_depth12_spectrum_and_lanczos():
    ev = tree.reduced_spectrum(12)
    assert len(ev) == 12286
    assert np.abs(ev).max() <= tree.SQRT8 + 1e-9
    lo, hi = tree.extreme_eigenvalues(tree.build_tree(12))
    assert abs(lo - ev.min()) < 1e-8 and abs(hi - ev.max()) < 1e-8


def test_distance_operators_match_bfs():
    t = tree.build_tree(5)
    dist = shortest_path(t.adjacency(), unweighted=True)
    ops = tree.distance_operators(t, 6)
    for k, op in enumerate(ops):
        assert np.array_equal(op.toarray(), (dist == k).astype(float))
    delta = np.zeros(t.n_vertices)
    delta[0] = 1
    assert np.dot(ops[2] @ delta, ops[2] @ delta) == 6


def test_dk_norms_within_bound():
    for row in tree.dk_norm_report(10, 6):
        assert row["norm"] <= row["bound"]


@pytest.mark.parametrize("K", range(0, 6))
def test_partial_sums_c08(K):
    assert tree.partial_sum_norm(0.8, K)["error"] <= 1e-9


def test_partial_sums_at_half_grow_like_three_halves_K():
    for K in (2, 4, 6):
        r = tree.partial_sum_norm(0.5, K)
        assert r["error"] <= 1e-9
        assert r["formula"] ** 2 - r["d"] ** 2 == pytest.approx(1.5 * K)


def test_c_pm_solve_the_quadratic():
    for lam in (3.0, -3.0, 4.5, 2.0 + 1j):
        for c in tree.c_pm(lam):
            assert abs(tree.lam_of_c(c) - lam) < 1e-12
    assert tree.c_plus(3.0) == pytest.approx(1.0)


def test_resolvent_residual_closed_form():
    # at lam = 3, c = 1 and the truncated series leaves residual 2^((1 - K)/2)
    rep = tree.resolvent_check(3.0, range(1, 61))
    for K, r in rep.residuals.items():
        assert r == pytest.approx(2 ** ((1 - K) / 2), rel=1e-12)
    assert rep.residuals[12] == pytest.approx(0.0220970869, rel=1e-8)
    assert rep.first_below(1e-6) == 41
    assert all(q <= rep.ratio_bound for q in rep.ratios)
    assert rep.printed_d_defect == pytest.approx(-5 / 6)


def test_resolvent_negative_lambda_is_symmetric():
    a = tree.resolvent_check(3.0, range(1, 30)).residuals
    b = tree.resolvent_check(-3.0, range(1, 30)).residuals
    assert all(a[k] == pytest.approx(b[k], rel=1e-10) for k in a)


def test_resolvent_radial_model_matches_explicit_tree():
    radial = tree.resolvent_check(3.0, range(1, 9)).residuals
    explicit = tree.resolvent_check(3.0, range(1, 9), model="tree").residuals
    assert all(abs(radial[k] - explicit[k]) < 1e-12 for k in radial)


def test_resolvent_normalisation_is_the_green_function():
    t = tree.build_tree(14)
    delta = np.zeros(t.n_vertices)
    delta[0] = 1
    g = spsolve((t.adjacency() - 3.0 * tree.sparse.identity(t.n_vertices)).tocsc(), delta)
    rep = tree.resolvent_check(3.0, [5])
    assert g[0] == pytest.approx(rep.scale.real, abs=1e-3)
    assert rep.scale.real == pytest.approx(-2 / 3)


def test_resolvent_warns_near_the_band():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        rep = tree.resolvent_check(2.83, range(1, 5))
    assert rep.warning and any(issubclass(x.category, RuntimeWarning) for x in w)


def test_harmonic_vg_depth10():
    hv = tree.harmonic_vg(10)
    assert hv["interior_dstar_zero"]
    assert hv["norm2"] == Fraction(1535, 512) == 3 - Fraction(1, 2**9)
    assert hv["laplacian_interior_sup"] <= 1e-12


@pytest.mark.parametrize("depth", [1, 2, 5, 8])
def test_harmonic_norm_formula(depth):
    hv = tree.harmonic_vg(depth)
    assert hv["norm2"] == 3 - Fraction(2, 2**depth)
    assert hv["n_edges"] == 1 + 4 * (2**depth - 1)


def test_f_function_examples():
    assert tree.f_function(1, 0, 0, 1) == 0
    assert tree.f_function(-1, -1, 1, 0) == 1
    with pytest.raises(ValueError):
        tree.f_function(1, 1, 1, 1)


@pytest.mark.parametrize("H", [1, 3, 5])
def test_sl2z_ball_matches_brute_force(H):
    r = range(-H, H + 1)
    brute = sorted(m for m in itertools.product(r, r, r, r) if m[0] * m[3] - m[1] * m[2] == 1)
    assert sorted(map(tuple, tree.sl2z_ball(H).tolist())) == brute


def test_sl2z_ball_size_h1():
    assert len(tree.sl2z_ball(1)) == 20


def test_lemma_f_holds():
    assert tree.lemma_f_bruteforce(1) == []
    assert tree.lemma_f_bruteforce(40) == []


@given(st.integers(-30, 30), st.integers(-30, 30), st.integers(-5, 5))
def test_f_vectorised_agrees(a, c, t):
    assume(math.gcd(a, c) == 1)
    _, x, y = tree._ext_gcd(a, c)
    m = np.array([[a, -y + t * a, c, x + t * c]])
    assert tree._f_vec(m)[0] == tree.f_function(*m[0].tolist())


@pytest.mark.parametrize("depth", range(1, 13))
def test_spectrum_in_band(depth):
    assert np.abs(tree.reduced_spectrum(depth)).max() <= tree.SQRT8 + 1e-9


def test_dk_bound_depth12():
    rows = tree.dk_norm_report(12, 8)
    assert len(rows) == 8 and all(r["norm"] <= r["bound"] for r in rows)


@given(st.floats(-10, 10), st.floats(0.05, 10))
def test_c_pm_off_band(re, im):
    lam = complex(re, im)
    for c in tree.c_pm(lam):
        assert abs(tree.lam_of_c(c) - lam) <= 1e-12 * max(1.0, abs(lam))


def test_partial_sums_diverge_below_half():
    assert tree.partial_sum_norm(0.3, 4)["direct"] < tree.partial_sum_norm(0.3, 6)["direct"]
