from fractions import Fraction as Q

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from so3alg.linalg import QMatrix


def test_identity_and_mul():
    a = QMatrix.from_rows([[1, 2], [3, 4]])
    assert QMatrix.identity(2) @ a == a
    assert a @ QMatrix.identity(2) == a


def test_rref_pivots_first_nonzero():
    a = QMatrix.from_rows([[0, 2, 1], [0, 4, 2], [1, 0, 0]])
    r, pivots = a.rref()
    assert pivots == [0, 1]
    assert r.data[0][0] == 1


def test_kernel_basis_exact():
    a = QMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    k = a.kernel_basis()
    assert k.cols == 2
    assert (a @ k).is_zero()


def test_kernel_of_injective_map_is_zero():
    a = QMatrix.from_rows([[1, 0], [0, 1], [1, 1]])
    assert a.kernel_basis().cols == 0


def test_cokernel_data():
    a = QMatrix.from_rows([[1, 0], [0, 0], [2, 0]])
    p, d = a.cokernel_data()
    assert d == 2
    assert (p @ a).is_zero()
    assert p.rank() == 2


def test_solve_consistent_and_inconsistent():
    a = QMatrix.from_rows([[1, 1], [0, 1]])
    x = a.solve([3, 1])
    assert x == [Q(2), Q(1)]
    b = QMatrix.from_rows([[1, 1], [2, 2]])
    assert b.solve([1, 3]) is None


def test_inverse_roundtrip():
    a = QMatrix.from_rows([[2, 1], [1, 1]])
    assert a @ a.inverse() == QMatrix.identity(2)
    with pytest.raises(ValueError):
        QMatrix.from_rows([[1, 1], [1, 1]]).inverse()


def test_solve_matrix():
    a = QMatrix.from_rows([[1, 2], [0, 1]])
    b = QMatrix.identity(2)
    x = a.solve_matrix(b)
    assert a @ x == b


@st.composite
def small_matrix(draw, rows=None, cols=None):
    r = rows or draw(st.integers(1, 4))
    c = cols or draw(st.integers(1, 4))
    data = draw(
        st.lists(
            st.lists(st.integers(-5, 5), min_size=c, max_size=c),
            min_size=r,
            max_size=r,
        )
    )
    return QMatrix.from_rows(data)


@given(small_matrix())
@settings(max_examples=50, deadline=None)
def test_rank_nullity(a):
    assert a.rank() + a.kernel_basis().cols == a.cols


@given(small_matrix())
@settings(max_examples=50, deadline=None)
def test_cokernel_complements_rank(a):
    p, d = a.cokernel_data()
    assert d == a.rows - a.rank()
    assert (p @ a).is_zero()


@given(small_matrix())
@settings(max_examples=30, deadline=None)
def test_kernel_vectors_annihilated(a):
    k = a.kernel_basis()
    assert (a @ k).is_zero()
