"""Petersson products, the Poincaré pairing and the unfolding counterexample."""

from vvsiegel import oracles
from vvsiegel.lattice import e8, hyperbolic_plane, orthogonal_sum
from vvsiegel.series import (
    SeriesConfig,
    cone_integral_check,
    petersson_constant,
    petersson_quadrature,
    poincare_coeff_pairing,
    unfolding_discrepancy,
)

L = orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())
delta = oracles.delta_function()

norm = petersson_quadrature(delta, delta, 12, 24, 6.0)
print(f"<Delta, Delta> = {norm['value'].real:.10e}  (error estimate {norm['error_estimate']:.1e})")

c = petersson_constant(10, 2)
print("c_{10,2} =", c.symbolic, "=", c.value)
print("cone integral check:", cone_integral_check(10, 2, [[1, 0], [0, 1]])["relative_error"])

for n in (6, 12, 24):
    rep = poincare_coeff_pairing(L, delta, 12, 0, 1, SeriesConfig(H=30), 1.0, n=n)
    print(f"n={n:2d}: <Delta, P_1> / (c_12 * tau(1)) - 1 = {abs(rep['ratio'] - 1):.2e}")

rep = unfolding_discrepancy(L, 12, 1, SeriesConfig(H=30))
print(f"<E12, P_1> (normalised) = {abs(rep['a']):.2e}, unfolded closed form = {rep['b']:.6f}")
print(f"<Delta, P_1> (normalised) = {rep['cusp_a'].real:.6f}, tau(1) = {rep['cusp_b']}")
