import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvsiegel import intmat
from vvsiegel.expansion import (
    InvalidKey,
    TruncatedExpansion,
    all_index_matrices,
    check_coeff_symmetry,
    essential_complement,
    essential_part,
    gl_reduce,
    is_cusp,
    siegel_phi,
    tkey,
    weight_parity_ok,
)
from vvsiegel.lattice import build_lattice, discriminant_group, moment_class


def theta_table(gram, g, cutoff, box=3):
    """Vector-valued theta series of a positive definite lattice, counted exactly."""
    L = build_lattice(gram)
    D = discriminant_group(L)
    G = L.gram_matrix
    Ginv = intmat.inverse(G)
    n = L.rank
    table = {}
    # dual vectors G^{-1} y with y integral, inside a box
    duals = [Ginv.dot(np.array(y, dtype=object)) for y in itertools.product(range(-box * 2, box * 2 + 1), repeat=n)]
    for vs in itertools.product(duals, repeat=g):
        T = tkey([[Fraction(vs[i].dot(G).dot(vs[j])) / 2 for j in range(g)] for i in range(g)])
        if sum(T[i][i] for i in range(g)) > cutoff:
            continue
        alpha = tuple(D.element_of_vector(v) for v in vs)
        table[(alpha, T)] = table.get((alpha, T), 0) + 1
    return TruncatedExpansion(L, g, Fraction(n, 2), cutoff, table)


@pytest.fixture(scope="module")
def theta2():
    return theta_table([[2]], 2, Fraction(2))


def test_parity_rule():
    assert weight_parity_ok(Fraction(1, 2), 1)
    assert weight_parity_ok(6, 0) and not weight_parity_ok(5, 0)
    assert not weight_parity_ok(Fraction(1, 3), 0)


def test_keys_validated():
    L = build_lattice([[2]])
    with pytest.raises(InvalidKey):
        TruncatedExpansion(L, 1, Fraction(1, 2), 3, {((1,), ((Fraction(1, 2),),)): 1})
    with pytest.raises(InvalidKey):
        TruncatedExpansion(L, 1, Fraction(1, 2), 1, {((0,), ((Fraction(2),),)): 1})


def test_theta_coefficients_are_gl_symmetric(theta2):
    for A in ([[0, 1], [1, 0]], [[1, 1], [0, 1]], [[-1, 0], [0, 1]]):
        rep = check_coeff_symmetry(theta2, A)
        assert rep["component"] == []


def test_siegel_operator_on_theta(theta2):
    low = siegel_phi(theta2, (0,))
    want = theta_table([[2]], 1, Fraction(2))
    for key in want.keys():
        assert low.get(*key) == want.table[key]
    # q(1) = 1/4 is nonzero, so Phi at beta = 1 kills everything
    assert siegel_phi(theta2, (1,)).table == {}


def test_theta_is_not_cusp(theta2):
    ok, bad = is_cusp(theta2)
    assert not ok and ((0, 0), ((0, 0), (0, 0))) in bad


def test_essential_split_partitions(theta2):
    ess, rest = essential_part(theta2), essential_complement(theta2)
    assert set(ess.table) | set(rest.table) == set(theta2.table)
    assert not set(ess.table) & set(rest.table)
    assert all(T[0][0] > 0 for _, T in ess.table)


def test_json_roundtrip(theta2):
    back = TruncatedExpansion.from_json(theta2.to_json())
    assert {k: complex(v) for k, v in back.table.items()} == {k: complex(v) for k, v in theta2.table.items()}


half = st.integers(-8, 8)


@given(st.integers(0, 12), half, st.integers(0, 12))
@settings(max_examples=200, deadline=None)
def test_gl_reduce_is_reduced_and_equivalent(a, b2, c):
    b = Fraction(b2, 2)
    if b * b > a * c:
        return
    red, A = gl_reduce([[a, b], [b, c]])
    (x, y), (_, z) = red
    assert 0 <= 2 * y <= x <= z or (x == 0 and y == 0)
    assert intmat.is_unimodular(A)
    Tm = intmat.as_frac_matrix([[a, b], [b, c]])
    assert tkey(A.T.dot(Tm).dot(A)) == red


def test_gl_reduce_is_canonical_on_orbits():
    T = [[2, Fraction(1, 2)], [Fraction(1, 2), 3]]
    base, _ = gl_reduce(T)
    Tm = intmat.as_frac_matrix(T)
    for A in ([[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, -1], [1, 3]]):
        A = intmat.as_int_matrix(A)
        assert gl_reduce(A.T.dot(Tm).dot(A))[0] == base


def test_all_index_matrices_are_in_class():
    D = discriminant_group(build_lattice([[2, 1], [1, 2]]))
    for alpha in [(0, 0), (1, 2), (1, 1)]:
        mats = all_index_matrices(D, alpha, 3)
        assert mats
        mc = moment_class(D, alpha)
        for T in mats:
            assert mc.contains(T)
            assert T[0][1] ** 2 <= T[0][0] * T[1][1]
            assert T[0][0] + T[1][1] <= 3
