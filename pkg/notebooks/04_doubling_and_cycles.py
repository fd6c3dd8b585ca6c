"""Coprime symmetric pairs, genus-2 Eisenstein series and cycle inversion."""

from vvsiegel.cycles import canonicalise, expand_ordinary, expand_primitive, verify_inversion
from vvsiegel.doubling import Genus2Config, enumerate_ST, fj_degeneration_check, setofrep_check, stratify
from vvsiegel.lattice import build_lattice, discriminant_group, e8, hyperbolic_plane, orthogonal_sum

pairs = list(enumerate_ST(2, 2))
print("ST(2), height 2:", {r: len(v) for r, v in sorted(stratify(pairs).items())})
for nu in (0, 1, 2):
    rep = setofrep_check(2, nu, 2)
    print(f"nu={nu}: candidates {rep['candidates']}, duplicates {rep['duplicate_orbits']}, uncovered {rep['uncovered_orbits']}")

L = orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())
rep = fj_degeneration_check(L, 6, [1j, 0.3 + 1.2j], Genus2Config())
for p in rep["points"]:
    print(f"tau_4={complex(*p['tau4'])}: Phi_0 = {complex(*p['phi0'][0]):.6f}  E_6 = {complex(*p['genus1'][0]):.6f}")

D = discriminant_group(build_lattice([[2]]))
z = expand_ordinary(D, [[1, 0], [0, 4]], (0, 0))
print("Z(diag(1,4), 0) =", z)
print("Z_prim(diag(1,4), 0) =", canonicalise(D, expand_primitive(D, [[1, 0], [0, 4]], (0, 0))))
print("inversion:", verify_inversion(build_lattice([[2]]), 2, 4)["ok"])
