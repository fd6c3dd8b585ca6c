"""Independent reference q-expansions for scalar level-one forms.

These never touch the coset machinery, so they serve as cross-checks for
the numeric series.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy


def divisor_sigma(n: int, r: int) -> int:
    return int(sympy.divisor_sigma(n, r))


def eisenstein_q_coeffs(k: int, n_terms: int) -> list[Fraction]:
    """Coefficients of the normalised level-one Eisenstein series E_k.

    c_0 = 1 and c_n = -(2k/B_k) sigma_{k-1}(n).
    """
    if k < 4 or k % 2:
        raise ValueError("k must be even and at least 4")
    b = sympy.bernoulli(k)
    factor = Fraction(-2 * k) / Fraction(int(b.p), int(b.q))
    return [Fraction(1)] + [factor * divisor_sigma(n, k - 1) for n in range(1, n_terms)]


def delta_q_coeffs(n_terms: int) -> list[int]:
    """Ramanujan tau(n) for n < n_terms from q * prod (1 - q^n)^24."""
    poly = [0] * n_terms
    poly[0] = 1
    for n in range(1, n_terms):
        for _ in range(24):
            # multiply in place by (1 - q^n), highest degree first
            for j in range(n_terms - 1, n - 1, -1):
                poly[j] -= poly[j - n]
    return [0] + poly[: n_terms - 1]


def q_series(coeffs, tau):
    """sum_n c_n e(n tau) evaluated at an array of points."""
    tau = np.asarray(tau, dtype=complex)
    q = np.exp(2j * np.pi * tau)
    out = np.zeros_like(tau)
    for c in reversed([complex(c) for c in coeffs]):
        out = out * q + c
    return out


def eisenstein_function(k: int, n_terms: int = 60):
    coeffs = eisenstein_q_coeffs(k, n_terms)
    return lambda tau: q_series(coeffs, tau)


def delta_function(n_terms: int = 60):
    coeffs = delta_q_coeffs(n_terms)
    return lambda tau: q_series(coeffs, tau)
