from fractions import Fraction

import numpy as np
import pytest

from vvsiegel.lattice import (
    Degenerate,
    NotEven,
    NotSymmetric,
    SublatticePair,
    build_lattice,
    discriminant_group,
    e8,
    enumerate_tuples,
    hyperbolic_plane,
    lattice_from_json,
    moment_class,
    orthogonal_sum,
    scaled_line,
)


def test_a1_discriminant_form():
    D = discriminant_group(build_lattice([[2]]))
    assert D.order == 2 and D.level == 4
    assert [D.q(a) for a in range(2)] == [0, Fraction(1, 4)]


def test_a2_discriminant_form():
    D = discriminant_group(build_lattice([[2, 1], [1, 2]]))
    assert D.order == 3 and D.level == 3
    assert sorted(D.q(a) for a in range(3)) == [0, Fraction(1, 3), Fraction(1, 3)]


def test_unimodular_lattices_have_trivial_group():
    for L in (e8(), hyperbolic_plane(), orthogonal_sum(hyperbolic_plane(), e8())):
        assert discriminant_group(L).order == 1
    assert e8().signature == 8 and hyperbolic_plane().signature == 0


def test_signature_of_indefinite_sum():
    L = orthogonal_sum(scaled_line(2), hyperbolic_plane())
    assert (L.sig_pos, L.sig_neg) == (2, 1)


@pytest.mark.parametrize("gram", [[[2, 1], [1, 2]], [[4, 0], [0, 6]], [[2, 0, 0], [0, 0, 3], [0, 3, 0]]])
def test_group_axioms(gram):
    D = discriminant_group(build_lattice(gram))
    n = D.order
    for a in range(n):
        assert D.add(a, D.neg(a)) == 0
        assert D.mul(n, a) == 0
        for b in range(n):
            assert D.add(a, b) == D.add(b, a)
            # polarisation: q(a+b) - q(a) - q(b) = b(a, b) mod 1
            lhs = D.q(D.add(a, b)) - D.q(a) - D.q(b)
            assert (lhs - D.b(a, b)).denominator == 1


def test_bilinear_form_is_nondegenerate():
    D = discriminant_group(build_lattice([[4, 0], [0, 6]]))
    for a in range(1, D.order):
        assert any(D.b(a, b) != 0 for b in range(D.order))


@pytest.mark.parametrize(
    "gram,exc",
    [([[1]], NotEven), ([[2, 1], [0, 2]], NotSymmetric), ([[2, 2], [2, 2]], Degenerate)],
)
def test_invalid_gram_rejected(gram, exc):
    with pytest.raises(exc):
        build_lattice(gram)


def test_json_roundtrip():
    L = build_lattice([[2, 1], [1, 4]], name="x")
    assert lattice_from_json(L.to_json()) == L


def test_tuple_indexing_roundtrip():
    D = discriminant_group(build_lattice([[2, 0], [0, 4]]))
    tuples = list(enumerate_tuples(D, 2))
    assert len(tuples) == D.order**2
    for i, t in enumerate(tuples):
        assert D.tuple_index(t) == i


def test_moment_class_membership():
    D = discriminant_group(build_lattice([[2]]))
    mc = moment_class(D, (1,))
    assert mc.contains([[Fraction(1, 4)]]) and mc.contains([[Fraction(5, 4)]])
    assert not mc.contains([[Fraction(1, 2)]])


def test_sublattice_maps_shapes():
    pair = SublatticePair(build_lattice([[2]]), np.array([[2]], dtype=object))
    assert pair.small.gram == ((8,),)
    f = [1, 2]
    assert len(pair.restrict(f, 1)) == pair.DM.order
    # trace of the restriction of f is index-weighted f
    tr = pair.trace(pair.restrict(f, 1), 1)
    assert tr == [2 * x for x in f]
