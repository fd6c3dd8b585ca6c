"""Even lattices, discriminant groups and their Q/Z-valued forms."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm, prod

import numpy as np

from . import intmat


class LatticeError(ValueError):
    """Base class for invalid lattice input."""


class NotEven(LatticeError):
    pass


class Degenerate(LatticeError):
    pass


class NotSymmetric(LatticeError):
    pass


class DimensionMismatch(ValueError):
    pass


class SizeExceeded(ValueError):
    pass


def mod1(x) -> Fraction:
    """Canonical representative of x + Z in [0, 1)."""
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class QmodZ:
    """An element of Q/Z, stored by its representative in [0, 1)."""

    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", mod1(self.value))

    def __add__(self, other):
        other = other.value if isinstance(other, QmodZ) else other
        return QmodZ(self.value + other)

    __radd__ = __add__

    def __neg__(self):
        return QmodZ(-self.value)

    def __sub__(self, other):
        return self + (-other if isinstance(other, QmodZ) else -Fraction(other))

    def __mul__(self, n: int):
        return QmodZ(self.value * n)

    __rmul__ = __mul__

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class EvenLattice:
    gram: tuple
    rank: int
    sig_pos: int
    sig_neg: int
    det: int
    name: str = ""

    @property
    def signature(self) -> int:
        """b+ - b-."""
        return self.sig_pos - self.sig_neg

    @property
    def gram_matrix(self):
        return intmat.as_int_matrix(self.gram)

    def direct_sum(self, other: "EvenLattice", name: str = "") -> "EvenLattice":
        a, b = self.gram_matrix, other.gram_matrix
        g = np.zeros((self.rank + other.rank,) * 2, dtype=object) * 0
        g[: self.rank, : self.rank] = a
        g[self.rank :, self.rank :] = b
        return build_lattice(g, name=name or f"{self.name}+{other.name}")

    def to_json(self) -> str:
        return json.dumps({"gram": [list(r) for r in self.gram], "name": self.name})


def build_lattice(gram, name: str = "") -> EvenLattice:
    """Validate an integral Gram matrix and compute its exact signature."""
    g = np.array(gram, dtype=object)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise NotSymmetric("Gram matrix must be square")
    try:
        g = intmat.as_int_matrix(g)
    except (ValueError, TypeError) as exc:
        raise LatticeError("Gram matrix must be integral") from exc
    if not (g == g.T).all():
        raise NotSymmetric("Gram matrix is not symmetric")
    if any(g[i, i] % 2 for i in range(g.shape[0])):
        raise NotEven("odd diagonal entry: the lattice is not even")
    d = int(intmat.det(g))
    if d == 0:
        raise Degenerate("Gram matrix is degenerate")
    pos, neg, zero = intmat.inertia(g)
    assert zero == 0
    return EvenLattice(intmat.to_key(g), g.shape[0], pos, neg, d, name)


def lattice_from_json(text_or_dict) -> EvenLattice:
    data = json.loads(text_or_dict) if isinstance(text_or_dict, str) else text_or_dict
    gram = data["gram"]
    for row in gram:
        for x in row:
            if not isinstance(x, int) or isinstance(x, bool):
                raise LatticeError("Gram entries must be JSON integers")
    return build_lattice(gram, name=data.get("name", ""))


def load_lattice(path) -> EvenLattice:
    with open(path) as fh:
        return lattice_from_json(json.load(fh))


def frac_to_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def str_to_frac(s) -> Fraction:
    return Fraction(s)


# Standard lattices used throughout the tests and demos.

def hyperbolic_plane() -> EvenLattice:
    return build_lattice([[0, 1], [1, 0]], name="U")


def e8() -> EvenLattice:
    g = [
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, -1],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, 0],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, -1, 0, 0, 0, 0, 2],
    ]
    return build_lattice(g, name="E8")


def scaled_line(m: int) -> EvenLattice:
    """Rank one lattice with Gram matrix (m)."""
    return build_lattice([[m]], name=f"<{m}>")


def orthogonal_sum(*parts: EvenLattice) -> EvenLattice:
    out = parts[0]
    for p in parts[1:]:
        out = out.direct_sum(p)
    return out


@dataclass(frozen=True)
class MomentClass:
    """Class of q(alpha) modulo the half-integral matrices.

    ``matrix`` holds the canonical representative: diagonal entries in
    [0, 1) and off-diagonal entries in [0, 1/2).
    """

    matrix: tuple

    @property
    def genus(self) -> int:
        return len(self.matrix)

    def contains(self, T) -> bool:
        g = self.genus
        T = intmat.as_frac_matrix(T)
        if T.shape != (g, g):
            raise DimensionMismatch("index matrix has the wrong size")
        for i in range(g):
            for j in range(g):
                if T[i, j] != T[j, i]:
                    return False
                d = T[i, j] - self.matrix[i][j]
                if i == j and d.denominator != 1:
                    return False
                if i != j and (2 * d).denominator != 1:
                    return False
        return True


def in_half_integral(T) -> bool:
    """Membership in the lattice of symmetric half-integral matrices."""
    T = intmat.as_frac_matrix(T)
    n = T.shape[0]
    for i in range(n):
        if T[i, i].denominator != 1:
            return False
        for j in range(i + 1, n):
            if T[i, j] != T[j, i] or (2 * T[i, j]).denominator != 1:
                return False
    return True


class DiscriminantGroup:
    """The finite quadratic module L'/L of an even lattice.

    Elements are encoded as integers ``0 .. order-1`` in mixed radix with
    respect to the elementary divisors ``generator_orders``; index 0 is
    the zero element.  ``coords(i)`` recovers the radix digits.
    """

    def __init__(self, lattice: EvenLattice):
        self.lattice = lattice
        G = lattice.gram_matrix
        diag, U, V = intmat.smith(G)
        keep = [i for i, d in enumerate(diag) if d != 1]
        self.generator_orders = [diag[i] for i in keep]
        self.order = prod(self.generator_orders)
        assert self.order == abs(lattice.det)
        self._U = U[keep] if keep else np.zeros((0, lattice.rank), dtype=object)
        Ginv = intmat.inverse(G)
        Uinv = intmat.inverse(U)
        # generator i is G^{-1} U^{-1} e_i, a vector of L' in L-coordinates
        self._gens = [np.dot(Ginv, Uinv[:, i]) for i in keep]
        self._G = G
        self._Ginv = Ginv
        self._radix = self.generator_orders
        self.vectors = [self._vector_of(self.coords(i)) for i in range(self.order)]
        n = self.order
        self.q_table = [mod1(Fraction(v.dot(G.dot(v))) / 2) for v in self.vectors]
        self.bilinear_table = [
            [mod1(self.vectors[a].dot(G.dot(self.vectors[b]))) for b in range(n)] for a in range(n)
        ]
        self._add = np.array(
            [[self.from_coords(self._add_coords(a, b)) for b in range(n)] for a in range(n)],
            dtype=np.int64,
        )
        self._neg = np.array([self.from_coords([-c for c in self.coords(a)]) for a in range(n)], dtype=np.int64)
        self.level = lcm(1, *(q.denominator for q in self.q_table))

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"DiscriminantGroup(orders={self.generator_orders}, level={self.level})"

    # coordinates -----------------------------------------------------
    def coords(self, idx: int) -> list:
        out = []
        for d in reversed(self._radix):
            out.append(idx % d)
            idx //= d
        return out[::-1]

    def from_coords(self, cs) -> int:
        idx = 0
        for c, d in zip(cs, self._radix):
            idx = idx * d + (int(c) % d)
        return idx

    def _add_coords(self, a, b):
        return [x + y for x, y in zip(self.coords(a), self.coords(b))]

    def _vector_of(self, cs):
        v = np.array([Fraction(0)] * self.lattice.rank, dtype=object)
        for c, gen in zip(cs, self._gens):
            v = v + c * gen
        return v

    def element_of_vector(self, v) -> int:
        """Class in L'/L of a dual-lattice vector given in L-coordinates."""
        y = np.dot(self._G, intmat.as_frac_matrix(v))
        if any(Fraction(x).denominator != 1 for x in y):
            raise ValueError("vector is not in the dual lattice")
        y = intmat.as_int_matrix(y).reshape(-1)
        return self.from_coords(list(np.dot(self._U, y)))

    # group law and forms ----------------------------------------------
    def add(self, a: int, b: int) -> int:
        return int(self._add[a, b])

    def neg(self, a: int) -> int:
        return int(self._neg[a])

    def mul(self, n: int, a: int) -> int:
        return self.from_coords([n * c for c in self.coords(a)])

    def q(self, a: int) -> Fraction:
        return self.q_table[a]

    def b(self, a: int, c: int) -> Fraction:
        return self.bilinear_table[a][c]

    def qz(self, a: int) -> QmodZ:
        return QmodZ(self.q_table[a])

    def bz(self, a: int, c: int) -> QmodZ:
        return QmodZ(self.bilinear_table[a][c])

    @cached_property
    def add_table(self) -> np.ndarray:
        return self._add.copy()

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self._neg.copy()

    def isotropic(self, a: int) -> bool:
        return self.q_table[a] == 0

    # tuples -----------------------------------------------------------
    def tuple_index(self, alpha) -> int:
        idx = 0
        for a in alpha:
            idx = idx * self.order + int(a)
        return idx

    def tuple_of_index(self, idx: int, g: int) -> tuple:
        out = []
        for _ in range(g):
            out.append(idx % self.order)
            idx //= self.order
        return tuple(reversed(out))

    def tuple_times_matrix(self, alpha, A) -> tuple:
        """The tuple alpha*A for an integer g x h matrix A (alpha as a row)."""
        A = intmat.as_int_matrix(A)
        g, h = A.shape
        if len(alpha) != g:
            raise DimensionMismatch("tuple length does not match matrix")
        out = []
        for j in range(h):
            acc = 0
            for i in range(g):
                if A[i, j]:
                    acc = self.add(acc, self.mul(int(A[i, j]), alpha[i]))
            out.append(acc)
        return tuple(out)


def discriminant_group(lattice: EvenLattice) -> DiscriminantGroup:
    return _disc_cache(lattice)


_DISC_CACHE: dict = {}


def _disc_cache(lattice):
    key = lattice.gram
    if key not in _DISC_CACHE:
        _DISC_CACHE[key] = DiscriminantGroup(lattice)
    return _DISC_CACHE[key]


def moment_class(D: DiscriminantGroup, alpha) -> MomentClass:
    g = len(alpha)
    if any(not 0 <= int(a) < D.order for a in alpha):
        raise DimensionMismatch("tuple entry outside the discriminant group")
    rows = []
    for i in range(g):
        row = []
        for j in range(g):
            if i == j:
                row.append(D.q(alpha[i]))
            else:
                half = D.b(alpha[i], alpha[j]) / 2
                row.append(half - Fraction((2 * half).numerator // (2 * half).denominator, 2))
        rows.append(tuple(row))
    return MomentClass(tuple(rows))


def moment_trace(D: DiscriminantGroup, alpha, B) -> Fraction:
    """tr(q(alpha) B) modulo 1 for an integral symmetric B."""
    B = intmat.as_int_matrix(B)
    g = len(alpha)
    acc = Fraction(0)
    for i in range(g):
        acc += D.q(alpha[i]) * B[i, i]
        for j in range(i + 1, g):
            acc += D.b(alpha[i], alpha[j]) * B[i, j]
    return mod1(acc)


DEFAULT_TUPLE_BOUND = 1 << 16


def enumerate_tuples(D: DiscriminantGroup, g: int, bound: int = DEFAULT_TUPLE_BOUND):
    """All g-tuples of D in lexicographic order (the basis order of C[D^g])."""
    if g < 0:
        raise ValueError("genus must be non-negative")
    if D.order**g > bound:
        raise SizeExceeded(f"|D|^g = {D.order ** g} exceeds bound {bound}")
    return itertools.product(range(D.order), repeat=g)


# sublattices -------------------------------------------------------------


@dataclass
class SublatticePair:
    """A finite index sublattice M of L given by a basis (columns in L-coordinates).

    Provides the restriction map C[D_L^g] -> C[D_M^g] and the trace map
    C[D_M^g] -> C[D_L^g]; vectors are lists in ``enumerate_tuples`` order.
    """

    big: EvenLattice
    basis: np.ndarray
    small: EvenLattice = field(init=False)

    def __post_init__(self):
        P = intmat.as_int_matrix(self.basis)
        if intmat.det(P) == 0:
            raise Degenerate("sublattice basis is not of full rank")
        self.basis = P
        G = self.big.gram_matrix
        self.small = build_lattice(P.T.dot(G).dot(P), name=f"sub({self.big.name})")
        self.DL = discriminant_group(self.big)
        self.DM = discriminant_group(self.small)
        # L-coordinates of each element of M'/M, then its image in D_L if in L'
        self.project = {}
        self.in_big = []
        for mu in range(self.DM.order):
            w = np.dot(P, self.DM.vectors[mu])
            y = np.dot(G, w)
            if all(Fraction(x).denominator == 1 for x in y):
                self.project[mu] = self.DL.element_of_vector(w)
                if all(Fraction(x).denominator == 1 for x in w):
                    self.in_big.append(mu)

    def restrict(self, f, g: int):
        """(f_M)_mu = f_{p(mu)} on (L'/M)^g and 0 elsewhere."""
        out = []
        zero = f[0] * 0
        for mu in enumerate_tuples(self.DM, g):
            if all(m in self.project for m in mu):
                out.append(f[self.DL.tuple_index([self.project[m] for m in mu])])
            else:
                out.append(zero)
        return out

    def trace(self, h, g: int):
        """(h^L)_gamma = sum of h_mu over mu in (L'/M)^g lying over gamma."""
        zero = h[0] * 0
        out = [zero] * self.DL.order**g
        for mu in enumerate_tuples(self.DM, g):
            if all(m in self.project for m in mu):
                idx = self.DL.tuple_index([self.project[m] for m in mu])
                out[idx] = out[idx] + h[self.DM.tuple_index(mu)]
        return out
