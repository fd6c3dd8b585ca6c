from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvsiegel import intmat
from vvsiegel.cycles import (
    CycleSymbol,
    FormalCycleSum,
    canonical_ordinary,
    canonical_primitive,
    divisors_of,
    expand_ordinary,
    expand_primitive,
    is_primitive_vector,
    mobius_of,
    verify_inversion,
)
from vvsiegel.expansion import tkey
from vvsiegel.lattice import build_lattice, discriminant_group, e8

F = Fraction
D1 = discriminant_group(e8())
DA1 = discriminant_group(build_lattice([[2]]))


def prim(T, a):
    return CycleSymbol("primitive", tkey(T), tuple(a))


def test_genus_one_square_divisors():
    s = expand_ordinary(D1, [[12]], (0,))
    assert s == FormalCycleSum({prim([[12]], (0,)): 1, prim([[3]], (0,)): 1})


def test_zero_diagonal_pins_divisor():
    # T = diag(0, 4): only R = diag(1, r) with r^2 | 4
    rs = [r for r, _ in divisors_of(D1, [[0, 0], [0, 4]], (0, 0))]
    assert rs == [(1, 1), (1, 2)]


def test_discriminant_coordinates_of_divisors():
    # on A1, 2 * beta = 0 for every beta, so R = 2 sends any beta to 0
    out = dict(divisors_of(DA1, [[1]], (0,)))
    assert out[(1,)] == ((0,),)
    assert out[(2,)] == ((1,),)


def test_mobius_of_diagonal():
    assert mobius_of([[2, 0], [0, 3]]) == 1
    assert mobius_of([[4, 0], [0, 1]]) == 0
    assert mobius_of([[2, 0], [0, 1]]) == -1


def test_formal_sum_cancellation():
    a = prim([[1]], (0,))
    s = FormalCycleSum({a: 2}) + FormalCycleSum({a: -2})
    assert s.terms == {}
    assert repr(s) == "0"


def test_ordinary_canonical_form_is_gl_invariant():
    T = [[1, F(1, 2)], [F(1, 2), 3]]
    base = canonical_ordinary(DA1, T, (0, 1))
    for A in ([[1, 1], [0, 1]], [[0, 1], [1, 0]], [[2, 1], [1, 1]]):
        A = intmat.as_int_matrix(A)
        T2 = A.T.dot(intmat.as_frac_matrix(T)).dot(A)
        a2 = DA1.tuple_times_matrix((0, 1), A)
        assert canonical_ordinary(DA1, T2, a2) == base


def test_primitive_symbols_are_not_gl_invariant():
    # diag(1, 4) and (1, 1; 1, 5) are GL-equivalent, yet their primitive expansions differ
    a = expand_ordinary(D1, [[1, 0], [0, 4]], (0, 0))
    b = expand_ordinary(D1, [[1, F(1)], [F(1), 5]], (0, 0))
    assert len(a.terms) == 2 and len(b.terms) == 1
    assert canonical_primitive(D1, [[4, 0], [0, 1]], (0, 0)) == canonical_primitive(D1, [[1, 0], [0, 4]], (0, 0))


@pytest.mark.parametrize("gram", [[[2]], [[2, 1], [1, 2]], [[4]]])
def test_inversion_small_windows(gram):
    for g in (1, 2):
        rep = verify_inversion(build_lattice(gram), g, 3)
        assert rep["ok"], rep["failures"][:3]
        assert rep["checked"] > 0


@given(st.integers(1, 40))
@settings(max_examples=40, deadline=None)
def test_genus_one_round_trip(n):
    s = expand_ordinary(D1, [[n]], (0,))
    back = FormalCycleSum()
    for sym, c in s.terms.items():
        back = back + expand_primitive(D1, sym.T, sym.alpha).scaled(c)
    assert back == FormalCycleSum({CycleSymbol("ordinary", ((F(n),),), (0,)): 1})


def test_expansion_rejects_wrong_class():
    with pytest.raises(ValueError):
        expand_ordinary(DA1, [[1]], (1,))


def test_primitive_vector():
    L = build_lattice([[2]])
    assert is_primitive_vector(L, [F(1, 2)])
    assert not is_primitive_vector(L, [1])
    with pytest.raises(ValueError):
        is_primitive_vector(L, [F(1, 4)])


def test_symbols_serialise():
    s = expand_primitive(D1, [[4]], (0,))
    data = s.to_list()
    assert {d["coeff"] for d in data} == {1, -1}
    assert data[0]["symbol"]["kind"] == "ordinary"
