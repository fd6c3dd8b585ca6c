import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vvsiegel.cyclotomic import (
    ConductorMismatch,
    CycMatrix,
    CycNumber,
    MilgramViolation,
    conductor_for,
    e_of,
    sqrt_disc,
)
from vvsiegel.lattice import build_lattice, discriminant_group, e8

CONDUCTORS = [8, 12, 24]
rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def cyc(draw, M=24):
    return CycNumber.from_poly(M, draw(st.lists(rat, min_size=1, max_size=M)))


@given(cyc(), cyc(), cyc())
@settings(max_examples=50, deadline=None)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == CycNumber.rational(24, 1)


@given(cyc(), cyc())
@settings(max_examples=50, deadline=None)
def test_embedding_is_a_homomorphism(a, b):
    for x, y in ((a + b, complex(a) + complex(b)), (a * b, complex(a) * complex(b)), (a.conj(), complex(a).conjugate())):
        assert abs(complex(x) - y) < 1e-9 * max(1, abs(y))


@pytest.mark.parametrize("M", CONDUCTORS)
def test_roots_of_unity(M):
    z = CycNumber.zeta_power(M, 1)
    assert z**M == CycNumber.rational(M, 1)
    assert z ** (M // 2) == CycNumber.rational(M, -1)
    assert abs(complex(z) - cmath.exp(2j * cmath.pi / M)) < 1e-12


def test_e_of_and_conductor_check():
    assert e_of(Fraction(1, 4), 8) == CycNumber.zeta_power(8, 2)
    with pytest.raises(ConductorMismatch):
        e_of(Fraction(1, 3), 8)


def test_embedding_across_conductors():
    a = CycNumber.zeta_power(8, 1)
    b = CycNumber.zeta_power(24, 8)
    prod = a * b
    assert prod.M == 24
    assert abs(complex(prod) - complex(a) * complex(b)) < 1e-12


@pytest.mark.parametrize("gram,sig", [([[2]], 1), ([[2, 1], [1, 2]], 2), ([[0, 2], [2, 0]], 0)])
def test_gauss_sum_is_positive_root(gram, sig):
    D = discriminant_group(build_lattice(gram))
    s = sqrt_disc(D, sig)
    assert s * s == CycNumber.rational(s.M, D.order)
    assert complex(s).real > 0


def test_gauss_sum_detects_wrong_signature():
    D = discriminant_group(build_lattice([[2]]))
    with pytest.raises(MilgramViolation):
        sqrt_disc(D, 3)


def test_unimodular_gauss_sum():
    D = discriminant_group(e8())
    assert sqrt_disc(D, 8) == CycNumber.rational(conductor_for(1), 1)


def test_matrix_product_and_adjoint():
    M = 8
    z = CycNumber.zeta_power(M, 1)
    A = CycMatrix.from_entries(M, [[z, 0], [0, z.conj()]])
    assert (A @ A.conj_transpose()).is_identity()
    B = CycMatrix.from_entries(M, [[1, Fraction(1, 2)], [0, 1]])
    C = A @ B
    assert C.entry(0, 1) == z * Fraction(1, 2)
    K = A.kron(B)
    assert K.shape == (4, 4)
    assert K.entry(1, 1) == z


def test_matrix_json_roundtrip_shape():
    A = CycMatrix.identity(8, 3)
    data = A.to_json()
    assert len(data) == 3 and len(data[0]) == 3
