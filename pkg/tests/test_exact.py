import numpy as np
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from adelic_lab.exact import column_basis, nullspace, rank


@given(arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.integers(-4, 4)))
def test_rank_nullity(a):
    ns = nullspace(a)
    assert ns.shape[0] == a.shape[1]
    assert ns.shape[1] == a.shape[1] - rank(a)
    assert not (a.astype(object) @ ns.astype(object)).any()
    assert rank(a) == np.linalg.matrix_rank(a.astype(float))


@given(arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.integers(-4, 4)))
def test_column_basis_spans(a):
    cb = column_basis(a)
    assert rank(cb) == cb.shape[1] == rank(a)
    assert rank(np.hstack([cb, a])) == rank(a)
