from hypothesis import given, settings, strategies as st

from kleinlab.linalg import combine, det, dot, nullspace, rank, rref, span_intersection

P = 7


def matrices(rows=4, cols=5):
    return st.lists(st.lists(st.integers(0, P - 1), min_size=cols, max_size=cols), min_size=1, max_size=rows)


def test_rref_identity():
    red, piv = rref([[2, 4], [1, 3]], P)
    assert red == [[1, 0], [0, 1]] and piv == [0, 1]


def test_nullspace_example():
    (v,) = nullspace([[1, 1, 0], [0, 1, 1]], 3, P)
    assert v == (1, 6, 1)


def test_det_small():
    assert det([[1, 2], [3, 4]], P) == (1 * 4 - 2 * 3) % P
    assert det([[1, 2], [2, 4]], P) == 0


@settings(max_examples=150)
@given(matrices())
def test_rank_nullity(m):
    assert rank(m, P) + len(nullspace(m, 5, P)) == 5
    assert len(rref(m, P)[0]) == rank(m, P)
    for v in nullspace(m, 5, P):
        assert all(dot(r, v, P) == 0 for r in m)


@settings(max_examples=150)
@given(matrices(3, 4), matrices(3, 4))
def test_span_intersection_lies_in_both(a, b):
    inter = span_intersection(a, b, P)
    assert len(inter) == rank(a, P) + rank(b, P) - rank(a + b, P)
    for v in inter:
        assert rank(a + [v], P) == rank(a, P)
        assert rank(b + [v], P) == rank(b, P)


def test_combine():
    assert combine([1, 2], [[1, 0], [3, 1]], P) == [0, 2]
