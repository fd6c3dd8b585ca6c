import numpy as np
import pytest

from vvsiegel import intmat
from vvsiegel.doubling import (
    Genus2Config,
    Genus2Eisenstein,
    SymPair,
    complete_pair,
    decompose_rank_one,
    enumerate_ST,
    fj_degeneration_check,
    gl_canonical,
    is_Mstar,
    mstar_completion,
    primitive_vectors,
    representative,
    setofrep_check,
    stratify,
    w_completion,
)
from vvsiegel.expansion import GenusUnsupported
from vvsiegel.lattice import build_lattice, e8, hyperbolic_plane, orthogonal_sum
from vvsiegel.metaplectic import BoundExceeded, is_symplectic
from vvsiegel.series import SeriesConfig

II = orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())


@pytest.fixture(scope="module")
def st2():
    return list(enumerate_ST(2, 1))


def test_genus_one_enumeration_is_coprime_pairs():
    pairs = list(enumerate_ST(1, 3))
    got = {(p.C[0][0], p.D[0][0]) for p, _ in pairs}
    want = {(c, d) for c in range(-3, 4) for d in range(-3, 4) if np.gcd(c, d) == 1}
    assert got == want


def test_enumeration_pairs_are_valid(st2):
    assert all(p.is_valid() and p.rank == r and p.height() <= 1 for p, r in st2)


def test_strata_partition(st2):
    strata = stratify(st2)
    assert sum(len(v) for v in strata.values()) == len(st2)
    assert set(strata) == {0, 1, 2}
    # rank 0 means C = 0 and D in GL_2(Z)
    assert all(intmat.is_unimodular(p.D) for p in strata[0])


def test_enumeration_guards():
    with pytest.raises(BoundExceeded):
        list(enumerate_ST(2, 4))
    with pytest.raises(GenusUnsupported):
        list(enumerate_ST(3, 1))


def test_canonical_form_is_left_gl_invariant(st2):
    rng = np.random.default_rng(0)
    for p, _ in st2[:: max(1, len(st2) // 40)]:
        U = intmat.as_int_matrix([[1, int(rng.integers(-2, 3))], [0, 1]]).dot(intmat.as_int_matrix([[0, 1], [1, 0]]))
        q = SymPair.make(U.dot(intmat.as_int_matrix(p.C)), U.dot(intmat.as_int_matrix(p.D)))
        assert gl_canonical(p) == gl_canonical(q)


def test_complete_pair_is_symplectic(st2):
    for p, _ in st2[::7]:
        M = complete_pair(p)
        assert is_symplectic(M)
        assert intmat.to_key(M[2:, :2]) == p.C and intmat.to_key(M[2:, 2:]) == p.D


def test_rank_one_representatives_roundtrip():
    for w in primitive_vectors(2, 2):
        for c, d in ((1, 0), (2, 1), (3, -2)):
            pair = representative(1, [[c]], [[d]], w_completion(w))
            assert pair.is_valid() and pair.rank == 1
            c2, d2, w2 = decompose_rank_one(pair)
            assert gl_canonical(representative(1, [[c2]], [[d2]], w_completion(w2))) == gl_canonical(pair)


@pytest.mark.parametrize("nu", [0, 1, 2])
def test_setofrep_small_window(nu):
    rep = setofrep_check(2, nu, 2)
    assert rep["ok"], rep


def test_mstar_membership():
    assert is_Mstar([[2]], 2)
    assert not is_Mstar([[2, 0], [0, 2]], 3)
    assert is_Mstar([[1, 0], [0, 2]], 3)
    assert not is_Mstar([[0]], 2)
    V = mstar_completion([[3, 1], [1, 2]], 3)
    assert intmat.is_unimodular(V) and (V[:2, :2] == intmat.as_int_matrix([[3, 1], [1, 2]])).all()


def test_genus2_eisenstein_modularity():
    ev = Genus2Eisenstein(II, 6, Genus2Config())
    tau = np.array([[0.1 + 1.1j, 0.2 + 0.3j], [0.2 + 0.3j, -0.2 + 1.3j]])
    taus = np.array([tau, tau + np.array([[1, 0], [0, 0]]), -np.linalg.inv(tau), tau[::-1, ::-1]])
    v, _ = ev.evaluate(taus, SeriesConfig(H=60))
    v = v[:, 0]
    assert abs(v[1] - v[0]) < 1e-3 * abs(v[0])
    assert abs(v[3] - v[0]) < 1e-3 * abs(v[0])
    assert abs(v[2] - np.linalg.det(tau) ** 6 * v[0]) < 1e-2 * abs(v[2])


def test_genus2_evaluator_rejects_odd_signature():
    with pytest.raises(ValueError):
        Genus2Eisenstein(build_lattice([[2]]), 6)


def test_fj_degeneration_nontrivial_group():
    rep = fj_degeneration_check(build_lattice([[0, 2], [2, 0]]), 6, [0.1 + 1.1j], Genus2Config(Hc=2, HB=3))
    assert rep["ok"], rep["points"]
