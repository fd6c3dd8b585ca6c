import numpy as np
import pytest

from vvsiegel import oracles


def test_divisor_sigma():
    assert oracles.divisor_sigma(12, 1) == 28
    assert oracles.divisor_sigma(7, 3) == 344


@pytest.mark.parametrize("k,c1", [(4, 240), (6, -504), (8, 480), (12, 65520 / 691)])
def test_eisenstein_first_coefficient(k, c1):
    coeffs = oracles.eisenstein_q_coeffs(k, 3)
    assert coeffs[0] == 1
    assert float(coeffs[1]) == pytest.approx(c1)


def test_ramanujan_tau():
    assert oracles.delta_q_coeffs(8) == [0, 1, -24, 252, -1472, 4830, -6048, -16744]


def test_e4_squared_is_e8():
    e4 = oracles.eisenstein_q_coeffs(4, 10)
    e8 = oracles.eisenstein_q_coeffs(8, 10)
    sq = [sum(e4[i] * e4[n - i] for i in range(n + 1)) for n in range(10)]
    assert sq == e8


def test_delta_from_eisenstein():
    e4 = oracles.eisenstein_function(4)
    e6 = oracles.eisenstein_function(6)
    delta = oracles.delta_function()
    tau = np.array([0.1 + 1.2j, -0.3 + 0.9j])
    assert np.allclose((e4(tau) ** 3 - e6(tau) ** 2) / 1728, delta(tau))


def test_weight_12_modularity():
    delta = oracles.delta_function()
    tau = np.array([0.2 + 1.1j])
    assert np.allclose(delta(-1 / tau), tau**12 * delta(tau))
