from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvsiegel import intmat

small = st.integers(-6, 6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


@given(square(3))
@settings(max_examples=60, deadline=None)
def test_smith_factorisation(rows):
    A = intmat.as_int_matrix(rows)
    diag, U, V = intmat.smith(A)
    S = U.dot(A).dot(V)
    assert intmat.is_unimodular(U) and intmat.is_unimodular(V)
    for i in range(3):
        for j in range(3):
            assert S[i, j] == (diag[i] if i == j else 0)
    nonzero = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@given(square(3))
@settings(max_examples=60, deadline=None)
def test_row_hnf_is_echelon_and_reduced(rows):
    A = intmat.as_int_matrix(rows)
    H, U = intmat.row_hnf(A)
    assert (U.dot(A) == H).all()
    assert intmat.is_unimodular(U)
    pivots = []
    for r in range(3):
        nz = [c for c in range(3) if H[r, c]]
        if nz:
            pivots.append((r, nz[0]))
    cols = [c for _, c in pivots]
    assert cols == sorted(cols) and len(set(cols)) == len(cols)
    for r, c in pivots:
        assert H[r, c] > 0
        assert all(0 <= H[i, c] < H[r, c] for i in range(r))


@given(square(3))
@settings(max_examples=60, deadline=None)
def test_det_matches_float(rows):
    assert intmat.det(rows) == round(np.linalg.det(np.array(rows, dtype=float)))


def test_det_is_exact_on_large_entries():
    big = 10**20
    assert intmat.det([[big, 1], [1, big]]) == big * big - 1


@given(st.lists(small, min_size=3, max_size=3).filter(lambda v: np.gcd.reduce(v) == 1))
@settings(max_examples=60, deadline=None)
def test_complete_columns_primitive_vector(v):
    W = intmat.complete_columns(intmat.as_int_matrix(v).reshape(-1, 1))
    assert intmat.is_unimodular(W)
    assert list(W[:, 0]) == v


def test_complete_columns_rejects_imprimitive():
    with pytest.raises(ValueError):
        intmat.complete_columns(intmat.as_int_matrix([2, 4]).reshape(-1, 1))


def test_minors_gcd_and_primitivity():
    assert intmat.minors_gcd([[1, 0, 0, 0], [0, 2, 0, 1]]) == 1
    assert intmat.minors_gcd([[2, 0], [0, 2]]) == 4
    assert intmat.is_primitive([[1, 2]])
    assert not intmat.is_primitive([[2, 4]])


def test_inverse_and_rank():
    A = intmat.as_int_matrix([[2, 1], [1, 1]])
    assert (intmat.int_inverse(A).dot(A) == intmat.identity(2)).all()
    assert intmat.inverse([[2, 0], [0, 4]])[1, 1] == Fraction(1, 4)
    assert intmat.rank([[1, 2], [2, 4]]) == 1


def test_inertia_counts_signs():
    assert intmat.inertia([[0, 1], [1, 0]]) == (1, 1, 0)
    assert intmat.inertia([[2, 1], [1, 2]]) == (2, 0, 0)


def test_kernel_basis_is_saturated():
    K = intmat.kernel_basis([[2, 4, 6]])
    assert K.shape == (3, 2)
    assert (intmat.as_int_matrix([[2, 4, 6]]).dot(K) == 0).all()
    assert intmat.is_primitive(K)


def test_non_integral_entry_rejected():
    with pytest.raises(ValueError):
        intmat.as_int_matrix([[Fraction(1, 2)]])
