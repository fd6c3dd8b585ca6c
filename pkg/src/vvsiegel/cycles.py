"""Formal special-cycle symbols Z(T, alpha) and their primitive counterparts.

Ordinary and primitive symbols are related by sums over diagonal divisor
matrices R:

    Z(T, a)      = sum_{R | T} sum_{b R = a} Z_prim(R^-1 T R^-1, b)
    Z_prim(T, a) = sum_{R | T} mu(R) sum_{b R = a} Z(R^-1 T R^-1, b)

where b runs over the tuples with R^-1 T R^-1 in q(b) + Lambda_g.  A zero
diagonal entry of T pins R_ii = 1: the zero vector is its own primitive
part, so larger R_ii would count it repeatedly.

Ordinary symbols are identified under the full GL_g(Z) symmetry
Z(T, a) = Z(A^t T A, a A).  Primitive symbols only under signed
permutations, which are the unimodular maps preserving entrywise
primitivity of tuples.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np
import sympy

from . import intmat
from .expansion import GenusUnsupported, all_index_matrices, gl_reduce, tkey
from .lattice import DiscriminantGroup, EvenLattice, discriminant_group, enumerate_tuples, moment_class


@dataclass(frozen=True)
class CycleSymbol:
    kind: str  # "ordinary" or "primitive"
    T: tuple
    alpha: tuple
    canonical: bool = False

    def __post_init__(self):
        if self.kind not in ("ordinary", "primitive"):
            raise ValueError("kind must be 'ordinary' or 'primitive'")

    @property
    def genus(self) -> int:
        return len(self.alpha)

    def to_dict(self):
        return {
            "kind": self.kind,
            "T": [[str(x) for x in row] for row in self.T],
            "alpha": list(self.alpha),
        }


class FormalCycleSum:
    """Integer combination of symbols; zero coefficients are dropped."""

    def __init__(self, terms=None):
        self.terms: dict = {}
        for sym, c in (terms or {}).items():
            self.add(sym, c)

    def add(self, sym: CycleSymbol, coeff: int = 1):
        v = self.terms.get(sym, 0) + coeff
        if v:
            self.terms[sym] = v
        else:
            self.terms.pop(sym, None)

    def __add__(self, other: "FormalCycleSum"):
        out = FormalCycleSum(self.terms)
        for s, c in other.terms.items():
            out.add(s, c)
        return out

    def scaled(self, c: int):
        return FormalCycleSum({s: c * v for s, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, FormalCycleSum) and self.terms == other.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (kv[0].kind, kv[0].T, kv[0].alpha))

    def to_list(self):
        return [{"symbol": s.to_dict(), "coeff": c} for s, c in self.items()]

    def __repr__(self):
        def one(s, c):
            T = "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in s.T) + "]"
            name = "Z" if s.kind == "ordinary" else "Zp"
            return f"{c:+d} {name}({T}, {list(s.alpha)})"

        return " ".join(one(s, c) for s, c in self.items()) or "0"


# divisors ----------------------------------------------------------------------------


def mobius_of(R) -> int:
    out = 1
    for i in range(len(R)):
        out *= int(sympy.mobius(int(R[i][i])))
    return out


def _scaled(T, r):
    g = len(T)
    return tuple(tuple(Fraction(T[i][j]) / (r[i] * r[j]) for j in range(g)) for i in range(g))


@functools.lru_cache(maxsize=None)
def _roots(D, r, a):
    """All b in D with r b = a."""
    return tuple(b for b in range(D.order) if D.mul(r, b) == a)


@functools.lru_cache(maxsize=None)
def _moment(D, beta):
    return moment_class(D, beta)


def divisors_of(D: DiscriminantGroup, T, alpha):
    """All (R, [beta, ...]) with beta R = alpha and R^-1 T R^-1 in q(beta) + Lambda.

    R is returned as a tuple of its diagonal entries.  Only R with at least
    one such beta are listed, so every listed R divides T.
    """
    return _divisors(D, tkey(T), tuple(alpha))


@functools.lru_cache(maxsize=None)
def _divisors(D, T, alpha):
    g = len(alpha)
    if not moment_class(D, alpha).contains(T):
        raise ValueError("T is not in q(alpha) + Lambda")
    ranges = []
    for i in range(g):
        t = T[i][i]
        if t == 0:
            ranges.append([1])
        else:
            # a nonzero diagonal entry of R^-1 T R^-1 is at least 1/level
            ranges.append(range(1, isqrt(int(t * D.level)) + 1))
    out = []
    for r in itertools.product(*ranges):
        # diagonal entries of R^-1 T R^-1 lie in (1/level) Z
        if any((T[i][i] * D.level / (r[i] * r[i])).denominator != 1 for i in range(g)):
            continue
        Tr = _scaled(T, r)
        betas = []
        # beta_i r_i = alpha_i, solved coordinatewise
        choices = [_roots(D, r[i], alpha[i]) for i in range(g)]
        for beta in itertools.product(*choices):
            if _moment(D, beta).contains(Tr):
                betas.append(beta)
        if betas:
            out.append((r, tuple(betas)))
    return tuple(out)


def expand_ordinary(D: DiscriminantGroup, T, alpha) -> FormalCycleSum:
    """Z(T, alpha) as a sum of primitive symbols (raw, not canonicalised)."""
    out = FormalCycleSum()
    for r, betas in divisors_of(D, T, alpha):
        Tr = _scaled(tkey(T), r)
        for beta in betas:
            out.add(CycleSymbol("primitive", Tr, tuple(beta)), 1)
    return out


def expand_primitive(D: DiscriminantGroup, T, alpha) -> FormalCycleSum:
    """Z_prim(T, alpha) as a signed sum of ordinary symbols (raw)."""
    out = FormalCycleSum()
    for r, betas in divisors_of(D, T, alpha):
        mu = 1
        for x in r:
            mu *= int(sympy.mobius(x))
        if not mu:
            continue
        Tr = _scaled(tkey(T), r)
        for beta in betas:
            out.add(CycleSymbol("ordinary", Tr, tuple(beta)), mu)
    return out


# canonical forms ----------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _automorph_generators(T):
    """Generators (or the full finite group) of {A : A^t T A = T} for reduced T, g = 2."""
    a, b, c = T[0][0], T[0][1], T[1][1]
    if a == 0 and c == 0:
        return [np.array(m, dtype=object) for m in ([[0, 1], [1, 0]], [[1, 1], [0, 1]], [[-1, 0], [0, 1]])]
    if a == 0:
        return [np.array(m, dtype=object) for m in ([[-1, 0], [0, 1]], [[1, 0], [0, -1]], [[1, 1], [0, 1]])]
    out = []
    for p, q, r, s in itertools.product((-1, 0, 1), repeat=4):
        # A = (p, q; r, s); A^t T A computed entrywise
        if abs(p * s - q * r) != 1:
            continue
        t11 = a * p * p + 2 * b * p * r + c * r * r
        t12 = a * p * q + b * (p * s + q * r) + c * r * s
        t22 = a * q * q + 2 * b * q * s + c * s * s
        if (t11, t12, t22) == (a, b, c):
            out.append(np.array([[p, q], [r, s]], dtype=object))
    return out


def _orbit(D, alpha, gens):
    seen = {tuple(alpha)}
    todo = [tuple(alpha)]
    while todo:
        a = todo.pop()
        for A in gens:
            b = D.tuple_times_matrix(a, A)
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return seen


def canonical_ordinary(D: DiscriminantGroup, T, alpha) -> CycleSymbol:
    """GL_g(Z)-canonical representative of Z(T, alpha)."""
    return _canonical_ordinary(D, tkey(T), tuple(alpha))


@functools.lru_cache(maxsize=None)
def _canonical_ordinary(D, T, alpha):
    g = len(alpha)
    if g == 1:
        best = min(alpha, (D.neg(alpha[0]),))
        return CycleSymbol("ordinary", tkey(T), best, True)
    if g != 2:
        raise GenusUnsupported("canonical forms are implemented for g <= 2")
    red, A = gl_reduce(T)
    a2 = D.tuple_times_matrix(alpha, A)
    best = min(_orbit(D, a2, _automorph_generators(red)))
    return CycleSymbol("ordinary", tkey(red), best, True)


def _signed_permutations(g):
    for perm in itertools.permutations(range(g)):
        for signs in itertools.product((1, -1), repeat=g):
            A = intmat.zeros(g)
            for i, p in enumerate(perm):
                A[i, p] = signs[i]
            yield A


def canonical_primitive(D: DiscriminantGroup, T, alpha) -> CycleSymbol:
    """Representative of Z_prim(T, alpha) under signed permutations."""
    return _canonical_primitive(D, tkey(T), tuple(alpha))


@functools.lru_cache(maxsize=None)
def _canonical_primitive(D, T, alpha):
    Tm = intmat.as_frac_matrix(T)
    best = None
    for A in _signed_permutations(len(alpha)):
        key = (tkey(A.T.dot(Tm).dot(A)), D.tuple_times_matrix(tuple(alpha), A))
        if best is None or key < best:
            best = key
    return CycleSymbol("primitive", best[0], best[1], True)


def canonicalise(D: DiscriminantGroup, s: FormalCycleSum) -> FormalCycleSum:
    out = FormalCycleSum()
    for sym, c in s.terms.items():
        canon = canonical_ordinary if sym.kind == "ordinary" else canonical_primitive
        out.add(canon(D, sym.T, sym.alpha), c)
    return out


# inversion ------------------------------------------------------------------------------


def admissible_symbols(D: DiscriminantGroup, g: int, trace_bound):
    for alpha in enumerate_tuples(D, g):
        for T in all_index_matrices(D, alpha, trace_bound):
            yield tkey(T), tuple(alpha)


def verify_inversion(lattice: EvenLattice, g: int, trace_bound) -> dict:
    """Check that the two expansions are mutually inverse on a window.

    Composes them in both orders for every admissible (T, alpha) with
    tr T <= trace_bound; the composite is compared with the single input
    symbol after canonicalisation.  Everything is integer algebra.
    """
    if g not in (1, 2):
        raise GenusUnsupported("inversion is checked for g <= 2")
    D = discriminant_group(lattice)
    failures, checked = [], 0
    for T, alpha in admissible_symbols(D, g, trace_bound):
        checked += 1
        prim = expand_ordinary(D, T, alpha)
        back = FormalCycleSum()
        for sym, c in prim.terms.items():
            back = back + expand_primitive(D, sym.T, sym.alpha).scaled(c)
        want = FormalCycleSum({canonical_ordinary(D, T, alpha): 1})
        if canonicalise(D, back) != want:
            failures.append({"T": [[str(x) for x in r] for r in T], "alpha": list(alpha), "direction": "ord->prim->ord"})
        ords = expand_primitive(D, T, alpha)
        fwd = FormalCycleSum()
        for sym, c in ords.terms.items():
            fwd = fwd + expand_ordinary(D, sym.T, sym.alpha).scaled(c)
        want = FormalCycleSum({canonical_primitive(D, T, alpha): 1})
        if canonicalise(D, fwd) != want:
            failures.append({"T": [[str(x) for x in r] for r in T], "alpha": list(alpha), "direction": "prim->ord->prim"})
    return {"g": g, "trace_bound": str(trace_bound), "order": D.order, "checked": checked,
            "failures": failures, "ok": not failures}


# vectors ----------------------------------------------------------------------------------


def is_primitive_vector(lattice: EvenLattice, v) -> bool:
    """Q v cap L' = Z v for v in L' given in L-coordinates.

    Equivalent to the coordinates of v in a basis of L' (namely G v) having
    gcd 1.
    """
    G = lattice.gram_matrix
    y = G.dot(intmat.as_frac_matrix(list(v)))
    if any(Fraction(x).denominator != 1 for x in y):
        raise ValueError("vector is not in the dual lattice")
    g = 0
    for x in y:
        g = gcd(g, int(x))
    return g == 1
