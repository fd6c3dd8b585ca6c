"""Fast sanity checks run by ``vvsiegel selftest``."""

from __future__ import annotations

import random
import time
from fractions import Fraction

import numpy as np

from . import oracles
from .cycles import verify_inversion
from .doubling import setofrep_check
from .lattice import build_lattice, e8, hyperbolic_plane, orthogonal_sum
from .metaplectic import random_word, recompose
from .series import SeriesConfig, eisenstein_coeffs_genus1, petersson_constant
from .weilrep import WeilRep, is_unitary


def _unitarity(rng, quick):
    L = build_lattice([[2, 1], [1, 2]])
    rep = WeilRep(L, 2, backend="exact")
    n = 3 if quick else 10
    return all(is_unitary(rep.rho_of(recompose(2, random_word(2, rng, 8)))) for _ in range(n))


def _eisenstein(quick):
    L = orthogonal_sum(hyperbolic_plane(), e8())
    H = 60 if quick else 200
    f, _ = eisenstein_coeffs_genus1(L, 4, SeriesConfig(H=H), 3)
    want = oracles.eisenstein_q_coeffs(4, 4)
    worst = max(abs(f.get((0,), ((m,),)) - float(want[m])) / float(want[m]) for m in range(1, 4))
    return worst < (1e-2 if quick else 1e-4)


def _petersson():
    # g = 1: (4 pi)^{1-k} Gamma(k-1)
    c = petersson_constant(Fraction(12), 1)
    return abs(c.value * (4 * np.pi) ** 11 / 3628800 - 1) < 1e-12


def run(quick: bool = False, seed: int = 0) -> dict:
    rng = random.Random(seed)
    checks = {
        "weil_unitarity": lambda: _unitarity(rng, quick),
        "eisenstein_coefficients": lambda: _eisenstein(quick),
        "petersson_constant": _petersson,
        "setofrep_rank1": lambda: setofrep_check(2, 1, 2)["ok"],
        "mobius_inversion": lambda: verify_inversion(build_lattice([[2]]), 2, 2 if quick else 3)["ok"],
    }
    results = {}
    for name, fn in checks.items():
        t0 = time.perf_counter()
        results[name] = {"ok": bool(fn()), "seconds": round(time.perf_counter() - t0, 3)}
    return {"checks": results, "ok": all(r["ok"] for r in results.values()), "quick": quick}
