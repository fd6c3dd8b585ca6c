"""Vector-valued Eisenstein series of weight 3 for A2, from coset sums."""

from vvsiegel import oracles
from vvsiegel.lattice import build_lattice, e8, hyperbolic_plane, orthogonal_sum
from vvsiegel.series import SeriesConfig, eisenstein_coeffs_genus1, siegel_phi_on_eisenstein_check

A2 = build_lattice([[2, 1], [1, 2]])
f, err = eisenstein_coeffs_genus1(A2, 3, SeriesConfig(H=150), 2)
for (alpha, T) in f.keys():
    v = f.table[(alpha, T)]
    print(f"alpha={alpha[0]}  m={str(T[0][0]):>4}  c = {v.real:12.5f}  (error estimate {err[(alpha, T)]:.1e})")

# trivial discriminant group: the scalar Eisenstein series
L = orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())
g, _ = eisenstein_coeffs_genus1(L, 6, SeriesConfig(H=200), 3)
want = oracles.eisenstein_q_coeffs(6, 4)
for m in range(4):
    print(f"E6: c_{m} = {g.get((0,), ((m,),)).real:.8f}  oracle {float(want[m]):.1f}")

rep = siegel_phi_on_eisenstein_check(A2, 3, SeriesConfig(H=120), m_max=1)
print("Siegel operator gives e_0:", rep["ok"])
