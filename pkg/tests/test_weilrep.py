import random
from fractions import Fraction

import numpy as np
import pytest

from vvsiegel import intmat
from vvsiegel.cyclotomic import CycMatrix, CycNumber, e_of
from vvsiegel.lattice import build_lattice, e8, hyperbolic_plane, orthogonal_sum
from vvsiegel.metaplectic import center, gen_S, random_word, recompose
from vvsiegel.weilrep import WeilRep, inner_product, is_unitary, kron

LATTICES = [[[2]], [[2, 1], [1, 2]], [[0, 2], [2, 0]], [[2, 0], [0, 4]]]


def test_genus1_S_matrix_for_a1():
    rep = WeilRep(build_lattice([[2]]), 1, "exact")
    S = rep.rho_S()
    # e(-1/8)/sqrt(2) * e(-b(a, c))
    assert abs(complex(S.entry(0, 0)) - np.exp(-2j * np.pi / 8) / np.sqrt(2)) < 1e-12
    assert abs(complex(S.entry(1, 1)) + np.exp(-2j * np.pi / 8) / np.sqrt(2)) < 1e-12


@pytest.mark.parametrize("gram", LATTICES)
def test_T_is_additive(gram):
    rep = WeilRep(build_lattice(gram), 2, "exact")
    B1 = intmat.as_int_matrix([[1, 0], [0, 2]])
    B2 = intmat.as_int_matrix([[0, 1], [1, -1]])
    assert rep.rho_T(B1) @ rep.rho_T(B2) == rep.rho_T(B1 + B2)


@pytest.mark.parametrize("gram", LATTICES)
def test_S_squared_is_negation_with_phase(gram):
    L = build_lattice(gram)
    rep = WeilRep(L, 1, "exact")
    S2 = rep.rho_S() @ rep.rho_S()
    phase = e_of(Fraction(-L.signature, 4), rep.M)
    D = rep.D
    for a in range(D.order):
        for b in range(D.order):
            want = phase if b == D.neg(a) else CycNumber.rational(rep.M, 0)
            assert S2.entry(b, a) == want


@pytest.mark.parametrize("gram", LATTICES)
def test_representation_respects_center(gram):
    L = build_lattice(gram)
    for g in (1, 2):
        rep = WeilRep(L, g, "exact")
        assert rep.rho_of(gen_S(g) ** 4) == rep.rho_of(center(g) ** g)


@pytest.mark.parametrize("gram", LATTICES[:3])
def test_homomorphism_on_random_words(gram):
    rng = random.Random(11)
    rep = WeilRep(build_lattice(gram), 1, "exact")
    for _ in range(10):
        a = recompose(1, random_word(1, rng, 8))
        b = recompose(1, random_word(1, rng, 8))
        assert rep.rho_of(a * b) == rep.rho_of(a) @ rep.rho_of(b)


@pytest.mark.parametrize("gram", LATTICES)
def test_numeric_backend_agrees_with_exact(gram):
    rng = random.Random(5)
    L = build_lattice(gram)
    ex, nu = WeilRep(L, 2, "exact"), WeilRep(L, 2, "numeric")
    for _ in range(5):
        gam = recompose(2, random_word(2, rng, 8))
        assert np.allclose(ex.rho_of(gam).to_complex(), nu.rho_of(gam), atol=1e-10)
        assert is_unitary(nu.rho_of(gam))


def test_unimodular_lattice_gives_a_character():
    L = orthogonal_sum(hyperbolic_plane(), e8())
    rep = WeilRep(L, 2, "exact")
    assert rep.dim == 1
    assert rep.rho_S() == CycMatrix.identity(rep.M, 1).scale(e_of(Fraction(-2 * 8, 8), rep.M))


def test_inner_product_and_kron():
    M = 8
    z = CycNumber.zeta_power(M, 1)
    assert inner_product([z, 1], [z, 1]) == CycNumber.rational(M, 2)
    A = CycMatrix.identity(M, 2)
    assert kron(A, A) == CycMatrix.identity(M, 4)


def test_backend_validation():
    with pytest.raises(ValueError):
        WeilRep(build_lattice([[2]]), 1, "float")
