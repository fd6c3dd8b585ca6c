"""Truncated Fourier expansions of vector-valued Siegel modular forms.

A table maps ``(alpha, T)`` to a coefficient, where ``alpha`` is a tuple of
discriminant-group indices and ``T`` a symmetric rational matrix stored as
a tuple of tuples of Fractions with T in q(alpha) + (half-integral).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from . import intmat
from .cyclotomic import CycNumber, e_of
from .lattice import DiscriminantGroup, EvenLattice, discriminant_group, frac_to_str, moment_class


class GenusUnsupported(ValueError):
    pass


class InvalidKey(ValueError):
    pass


def tkey(T) -> tuple:
    T = intmat.as_frac_matrix(T)
    return tuple(tuple(Fraction(x) for x in row) for row in T.tolist())


def trace(T) -> Fraction:
    return sum((T[i][i] for i in range(len(T))), Fraction(0))


def is_psd(T) -> bool:
    _, neg, _ = intmat.inertia(T) if len(T) else (0, 0, 0)
    return neg == 0


def is_singular(T) -> bool:
    return len(T) > 0 and intmat.rank(T) < len(T)


def weight_parity_ok(k, sig: int) -> bool:
    """2k = n - 2 = sig (mod 4)."""
    k2 = Fraction(k) * 2
    return k2.denominator == 1 and (int(k2) - sig) % 4 == 0


@dataclass
class TruncatedExpansion:
    lattice: EvenLattice
    genus: int
    weight: Fraction
    cutoff: Fraction
    table: dict = field(default_factory=dict)
    backend: str = "numeric"
    validate: bool = True

    def __post_init__(self):
        self.weight = Fraction(self.weight)
        self.cutoff = Fraction(self.cutoff)
        self.D = discriminant_group(self.lattice)
        self.table = {(tuple(a), tkey(T)): v for (a, T), v in self.table.items()}
        if self.validate:
            for a, T in self.table:
                self.check_key(a, T)

    @property
    def parity_ok(self) -> bool:
        return weight_parity_ok(self.weight, self.lattice.signature)

    def check_key(self, alpha, T):
        if len(alpha) != self.genus or len(T) != self.genus:
            raise InvalidKey("key has the wrong genus")
        if self.genus and not moment_class(self.D, alpha).contains(T):
            raise InvalidKey(f"T={T} is not in q(alpha)+Lambda for alpha={alpha}")
        if self.genus and not is_psd(T):
            raise InvalidKey(f"T={T} is not positive semidefinite")
        if trace(T) > self.cutoff:
            raise InvalidKey(f"T={T} exceeds the cutoff")

    def zero(self):
        if self.backend == "exact":
            from .cyclotomic import conductor_for

            return CycNumber.rational(conductor_for(self.D.level), 0)
        return 0j

    def get(self, alpha, T):
        return self.table.get((tuple(alpha), tkey(T)), self.zero())

    def _like(self, table, genus=None):
        return TruncatedExpansion(
            self.lattice, self.genus if genus is None else genus, self.weight, self.cutoff, table, self.backend, validate=False
        )

    def __add__(self, other: "TruncatedExpansion"):
        table = dict(self.table)
        for key, v in other.table.items():
            table[key] = table[key] + v if key in table else v
        return TruncatedExpansion(self.lattice, self.genus, self.weight, min(self.cutoff, other.cutoff),
                                  {k: v for k, v in table.items() if trace(k[1]) <= min(self.cutoff, other.cutoff)},
                                  self.backend, validate=False)

    def keys(self):
        return sorted(self.table)

    def to_json(self) -> str:
        coeffs = []
        for (a, T) in self.keys():
            v = self.table[(a, T)]
            if isinstance(v, CycNumber):
                val = v.to_json()
            else:
                c = complex(v)
                val = [float(f"{c.real:.17g}"), float(f"{c.imag:.17g}")]
            coeffs.append({"alpha": list(a), "T": [[frac_to_str(x) for x in row] for row in T], "value": val})
        return json.dumps(
            {
                "genus": self.genus,
                "weight": frac_to_str(self.weight),
                "cutoff": frac_to_str(self.cutoff),
                "gram": [list(r) for r in self.lattice.gram],
                "coeffs": coeffs,
            }
        )

    @classmethod
    def from_json(cls, text, lattice: EvenLattice | None = None):
        from .lattice import build_lattice

        data = json.loads(text)
        lat = lattice or build_lattice(data["gram"])
        table = {}
        backend = "numeric"
        for item in data["coeffs"]:
            v = item["value"]
            if isinstance(v, dict):
                v = CycNumber.from_json(v)
                backend = "exact"
            else:
                v = complex(v[0], v[1])
            table[(tuple(item["alpha"]), tkey([[Fraction(x) for x in row] for row in item["T"]]))] = v
        return cls(lat, data["genus"], Fraction(data["weight"]), Fraction(data["cutoff"]), table, backend)


def moment_is_zero(D: DiscriminantGroup, beta) -> bool:
    """q(beta) = 0 in Sym/(half-integral) for a tuple beta."""
    mc = moment_class(D, beta)
    return all(x == 0 for row in mc.matrix for x in row)


def siegel_phi(f: TruncatedExpansion, beta) -> TruncatedExpansion:
    """Siegel operator with index beta in D^{g-r}.

    Keeps the coefficients of index diag(T*, 0) in the components
    (alpha, beta); the cutoff is inherited.
    """
    beta = tuple(beta)
    s = len(beta)
    r = f.genus - s
    if r < 0:
        raise ValueError("beta is longer than the genus")
    if not moment_is_zero(f.D, beta):
        return f._like({}, genus=r)
    out = {}
    for (a, T), v in f.table.items():
        if a[r:] != beta:
            continue
        if any(T[i][j] for i in range(f.genus) for j in range(f.genus) if i >= r or j >= r):
            continue
        out[(a[:r], tuple(row[:r] for row in T[:r]))] = v
    return f._like(out, genus=r)


def transform_key(D, alpha, T, A):
    """(alpha A, A^t T A)."""
    A = intmat.as_int_matrix(A)
    Tm = intmat.as_frac_matrix(T)
    return D.tuple_times_matrix(alpha, A), tkey(A.T.dot(Tm).dot(A))


def check_coeff_symmetry(f: TruncatedExpansion, A):
    """Violations of c_T(f) = phi^{2k} rho(R_A, phi) c_{A^tTA}(f) and its componentwise form.

    Partners beyond the cutoff are skipped.  Returns a dict with the two
    (deterministically ordered) violation lists.
    """
    from .weilrep import WeilRep

    A = intmat.as_int_matrix(A)
    g = f.genus
    if A.shape != (g, g) or not intmat.is_unimodular(A):
        raise ValueError("A must be in GL_g(Z)")
    rep = WeilRep(f.lattice, g, backend="exact" if f.backend == "exact" else "numeric")
    perm = rep._r_perm(A)  # e_beta -> e_{beta A^{-1}}
    det_a = int(intmat.det(A))
    # phi^{2k} times the R_A phase (sqrt det A)^{-sig}, principal root
    expo = (2 * f.weight - f.lattice.signature) / 4 if det_a == -1 else Fraction(0)
    if f.backend == "exact":
        factor = e_of(expo, rep.M)
    else:
        factor = np.exp(2j * np.pi * float(expo))
    inv_perm = {p: i for i, p in enumerate(perm)}
    tuples = rep.tuples
    Ts = sorted({T for (_, T) in f.table} | {transform_key(f.D, (0,) * g, T, intmat.int_inverse(A))[1] for (_, T) in f.table})
    vector_viol, comp_viol = [], []
    for T in Ts:
        if trace(T) > f.cutoff:
            continue
        _, T2 = transform_key(f.D, (0,) * g, T, A)
        if trace(T2) > f.cutoff:
            continue
        for idx, alpha in enumerate(tuples):
            lhs = f.get(alpha, T)
            # (rho(R_A) c)_alpha picks the beta with beta A^{-1} = alpha
            beta = tuples[inv_perm[idx]] if idx in inv_perm else None
            rhs = factor * f.get(beta, T2)
            if not _close(lhs, rhs):
                vector_viol.append((alpha, T, lhs, rhs))
            alpha_a, _ = transform_key(f.D, alpha, T, A)
            rhs2 = f.get(alpha_a, T2)
            if not _close(lhs, rhs2):
                comp_viol.append((alpha, T, lhs, rhs2))
    return {"vector": vector_viol, "component": comp_viol}


def _close(a, b, tol=1e-9):
    if isinstance(a, CycNumber) or isinstance(b, CycNumber):
        return a == b
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(a)), abs(complex(b)))


def is_cusp(f: TruncatedExpansion, tol: float = 0.0):
    """(True, []) iff every singular-index coefficient is within tol of zero."""
    bad = []
    for (a, T) in f.keys():
        if not is_singular(T):
            continue
        v = f.table[(a, T)]
        size = 0.0 if (isinstance(v, CycNumber) and v.is_zero()) else abs(complex(v))
        if isinstance(v, CycNumber) and tol == 0:
            if not v.is_zero():
                bad.append((a, T))
        elif size > tol:
            bad.append((a, T))
    return not bad, bad


def gl_reduce(T):
    """Reduce a PSD form of genus <= 2 under T -> A^t T A.

    Returns (T_red, A) with 0 <= 2 T12 <= T11 <= T22 for genus 2.
    """
    Tm = intmat.as_frac_matrix(T)
    g = Tm.shape[0]
    if g == 1:
        return tkey(Tm), intmat.identity(1)
    if g != 2:
        raise GenusUnsupported("reduction is implemented for genus <= 2")
    a, b, c = Tm[0, 0], Tm[0, 1], Tm[1, 1]
    A = intmat.identity(2)
    for _ in range(10000):
        changed = False
        if a > c:
            a, c = c, a
            A = A.dot(np.array([[0, 1], [1, 0]], dtype=object))
            changed = True
        if a > 0 and abs(2 * b) > a:
            n = (b / a + Fraction(1, 2)).__floor__()
            # x1 -> x1, x2 -> x2 - n x1
            c = c - 2 * n * b + n * n * a
            b = b - n * a
            A = A.dot(np.array([[1, -n], [0, 1]], dtype=object))
            changed = True
        elif a == 0 and b != 0:
            raise ValueError("form is not positive semidefinite")
        if not changed:
            break
    if b < 0:
        b = -b
        A = A.dot(np.array([[1, 0], [0, -1]], dtype=object))
    red = ((a, b), (b, c))
    assert tkey(A.T.dot(Tm).dot(A)) == red
    return red, A


def essential_split(f: TruncatedExpansion, r: int = 1):
    """Split keys by whether the upper-left r x r block of T is positive definite."""
    if f.genus != 2 or r != 1:
        raise GenusUnsupported("essential part is implemented for genus 2, r = 1")
    ess, rest = {}, {}
    for key, v in f.table.items():
        (ess if key[1][0][0] > 0 else rest)[key] = v
    return f._like(ess), f._like(rest)


def essential_part(f: TruncatedExpansion, r: int = 1):
    return essential_split(f, r)[0]


def essential_complement(f: TruncatedExpansion, r: int = 1):
    return essential_split(f, r)[1]


def all_index_matrices(D, alpha, cutoff):
    """All PSD T in q(alpha)+Lambda with tr T <= cutoff (genus 1 or 2)."""
    g = len(alpha)
    mc = moment_class(D, alpha).matrix
    cutoff = Fraction(cutoff)
    out = []
    if g == 1:
        t = mc[0][0]
        while t <= cutoff:
            out.append(((t,),))
            t += 1
        return out
    if g != 2:
        raise GenusUnsupported("enumeration is implemented for genus <= 2")
    a0, c0, b0 = mc[0][0], mc[1][1], mc[0][1]
    a = a0
    while a <= cutoff:
        c = c0
        while a + c <= cutoff:
            # b runs over b0 + Z/2 with b^2 <= a c
            reach = 2 * (isqrt(int(a * c) + 1) + 1)
            for m in range(-reach, reach + 1):
                b = b0 + Fraction(m, 2)
                if b * b <= a * c:
                    out.append(((a, b), (b, c)))
            c += 1
        a += 1
    return out
