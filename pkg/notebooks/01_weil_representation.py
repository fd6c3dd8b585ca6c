"""Exact Weil representation matrices and their basic relations."""

import random

from vvsiegel.lattice import build_lattice, discriminant_group
from vvsiegel.metaplectic import decompose, gen_S, iota, random_word, recompose
from vvsiegel.weilrep import WeilRep, is_unitary, kron

L = build_lattice([[2, 1], [1, 2]], name="A2")
D = discriminant_group(L)
print(f"A2: |D| = {D.order}, level {D.level}, q = {[str(D.q(a)) for a in range(D.order)]}")

rep = WeilRep(L, 1, backend="exact")
S = rep.rho_S()
print("rho(S) numerically:\n", S.to_complex().round(4))
print("rho(S) unitary:", is_unitary(S))

rng = random.Random(1)
gam = recompose(2, random_word(2, rng, 10))
word, flips = decompose(gam)
print(f"random genus-2 element rebuilt from a word of length {len(word)} (flips={flips})")
rep2 = WeilRep(L, 2, backend="exact")
print("genus 2 unitary:", is_unitary(rep2.rho_of(gam)))

a = recompose(1, random_word(1, rng, 6))
b = recompose(1, random_word(1, rng, 6))
print("rho_2(iota(a, b)) == rho_1(a) (x) rho_1(b):", rep2.rho_of(iota(a, b)) == kron(rep.rho_of(a), rep.rho_of(b)))
print("S_2 == iota(S_1, S_1):", gen_S(2) == iota(gen_S(1), gen_S(1)))
