import math
from fractions import Fraction

import numpy as np
import pytest

from vvsiegel import oracles
from vvsiegel.lattice import build_lattice, e8, hyperbolic_plane, orthogonal_sum
from vvsiegel.metaplectic import random_word, recompose
from vvsiegel.series import (
    NonconvergentWeight,
    NonPositiveIndex,
    ParityMismatch,
    SeriesConfig,
    WeightTooSmall,
    cone_integral_check,
    decay_profile,
    eisenstein_coeffs_genus1,
    eisenstein_genus1,
    fundamental_domain_rule,
    holomorphic_normalisation,
    modularity_defect,
    petersson_constant,
    petersson_quadrature,
    poincare_genus1,
    tail_bound,
    unfolding_discrepancy,
)

A2 = build_lattice([[2, 1], [1, 2]])
II = orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())
FAST = SeriesConfig(H=40)


def test_weight_guards():
    with pytest.raises(NonconvergentWeight):
        eisenstein_genus1(II, 0, FAST, [1j])
    with pytest.raises(ParityMismatch):
        eisenstein_genus1(A2, 4, FAST, [1j])
    with pytest.raises(WeightTooSmall):
        petersson_constant(4, 2)
    with pytest.raises(NonPositiveIndex):
        unfolding_discrepancy(II, 12, 0, FAST)
    with pytest.raises(ValueError):
        SeriesConfig(H=0)


def test_scalar_eisenstein_matches_oracle():
    tau = np.array([0.1 + 1.3j, -0.4 + 0.95j, 0.5j + 0.2])
    vals, tail = eisenstein_genus1(II, 6, SeriesConfig(H=120), tau)
    want = oracles.eisenstein_function(6)(tau)
    assert np.all(np.abs(vals[:, 0] - want) <= tail)


@pytest.mark.parametrize("word_seed", [1, 2, 3])
def test_vector_valued_modularity(word_seed):
    import random

    gam = recompose(1, random_word(1, random.Random(word_seed), 6))
    rep = modularity_defect(A2, 3, SeriesConfig(H=80), gam, 0.13 + 1.1j)
    assert rep["defect"] <= rep["tail"]


def test_a2_coefficients_within_reported_error():
    f, err = eisenstein_coeffs_genus1(A2, 3, SeriesConfig(H=120), 1)
    known = {((0,), ((0,),)): 1, ((0,), ((1,),)): -90, ((1,), ((Fraction(1, 3),),)): -9, ((2,), ((Fraction(1, 3),),)): -9}
    for key, v in known.items():
        assert abs(f.table[key] - v) <= err[key]
        assert abs(f.table[key] - v) < 0.05 * max(1, abs(v))


def test_threads_do_not_change_results():
    tau = -0.5 + np.arange(700) / 700 + 1.5j
    one, _ = eisenstein_genus1(A2, 3, SeriesConfig(H=30, threads=1), tau)
    many, _ = eisenstein_genus1(A2, 3, SeriesConfig(H=30, threads=4), tau)
    assert np.array_equal(one, many)


def test_tail_bound_decreases_with_height():
    assert tail_bound(6, 100, 1j) < tail_bound(6, 50, 1j)


def test_fundamental_domain_area():
    tau, w = fundamental_domain_rule(20, 8.0)
    area = np.sum(w / tau.imag**2)
    assert area == pytest.approx(math.pi / 3 - 1 / 8, rel=1e-10)


def test_petersson_constant_genus_one_closed_form():
    for k in (3, 6, 12):
        c = petersson_constant(k, 1)
        assert c.value == pytest.approx(math.gamma(k - 1) / (4 * math.pi) ** (k - 1), rel=1e-12)
    assert cone_integral_check(Fraction(7, 2), 1, [[2]])["exact_match"]


def test_delta_norm_is_positive_and_converged():
    d = oracles.delta_function()
    res = petersson_quadrature(d, d, 12, 24, 6.0)
    assert res["value"].real > 0 and abs(res["value"].imag) < 1e-12
    # the Petersson norm of Delta is about 1.035e-6
    assert res["value"].real == pytest.approx(1.0353620568e-6, rel=1e-6)


def test_poincare_is_periodic_and_decays():
    tau = np.array([0.2 + 1.5j])
    a, _ = poincare_genus1(II, 12, 0, 1, SeriesConfig(H=30), tau)
    b, _ = poincare_genus1(II, 12, 0, 1, SeriesConfig(H=30), tau + 1)
    assert np.allclose(a, b)
    prof = decay_profile(lambda t: poincare_genus1(II, 12, 0, 1, SeriesConfig(H=30), t)[0], 12, [4.0, 8.0])
    assert prof[1] < prof[0]


def test_holomorphic_normalisation():
    assert holomorphic_normalisation(12, 1) == pytest.approx((4 * math.pi) ** 11 / math.factorial(10))
