"""Exact arithmetic in the cyclotomic field Q(zeta_M).

Numbers are stored in the power basis 1, z, ..., z^(phi(M)-1) modulo the
cyclotomic polynomial.  ``CycMatrix`` stores whole matrices with integer
coefficient slices and one common denominator so that matrix products
reduce to integer matrix products.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm

import numpy as np
from sympy import Poly, cyclotomic_poly, symbols, totient

from .lattice import mod1

_x = symbols("x")


class ConductorMismatch(ValueError):
    pass


class MilgramViolation(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def cyclotomic_data(M: int):
    """(phi(M), table) where row j of ``table`` is x^j mod Phi_M for 0 <= j < M."""
    phi = int(totient(M))
    coeffs = [int(c) for c in Poly(cyclotomic_poly(M, _x), _x).all_coeffs()[::-1]]
    assert coeffs[-1] == 1 and len(coeffs) == phi + 1
    table = np.zeros((M, phi), dtype=object) * 0
    cur = [0] * phi
    cur[0] = 1
    for j in range(M):
        table[j] = cur
        # multiply by x and reduce the overflow with x^phi = -sum c_i x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [a - top * c for a, c in zip(cur, coeffs[:-1])]
    table.setflags(write=False)
    return phi, table


@lru_cache(maxsize=None)
def _shift_matrix(M: int, a: int):
    """Matrix of multiplication by z^a acting on row coefficient vectors."""
    phi, table = cyclotomic_data(M)
    return np.array([table[(j + a) % M] for j in range(phi)], dtype=object)


@lru_cache(maxsize=None)
def _conj_matrix(M: int):
    phi, table = cyclotomic_data(M)
    return np.array([table[(-j) % M] for j in range(phi)], dtype=object)


@lru_cache(maxsize=None)
def _embedding(M: int):
    phi, _ = cyclotomic_data(M)
    return np.exp(2j * np.pi * np.arange(phi) / M)


class CycNumber:
    """An element of Q(zeta_M) with ``zeta_M -> e(1/M)`` as complex embedding."""

    __slots__ = ("M", "coeffs")

    def __init__(self, M: int, coeffs):
        phi, _ = cyclotomic_data(M)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != phi:
            raise ValueError(f"expected {phi} coefficients for conductor {M}")
        self.M = M
        self.coeffs = coeffs

    # constructors -----------------------------------------------------
    @classmethod
    def from_poly(cls, M: int, poly):
        """Reduce sum poly[j] z^j (any length) modulo Phi_M."""
        phi, table = cyclotomic_data(M)
        acc = [Fraction(0)] * phi
        for j, c in enumerate(poly):
            if c:
                row = table[j % M]
                for i in range(phi):
                    if row[i]:
                        acc[i] += c * row[i]
        return cls(M, acc)

    @classmethod
    def rational(cls, M: int, r):
        phi, _ = cyclotomic_data(M)
        return cls(M, [Fraction(r)] + [0] * (phi - 1))

    @classmethod
    def zeta_power(cls, M: int, a: int):
        phi, table = cyclotomic_data(M)
        return cls(M, list(table[a % M]))

    # arithmetic -------------------------------------------------------
    def embed(self, M: int) -> "CycNumber":
        if M == self.M:
            return self
        if M % self.M:
            raise ConductorMismatch(f"cannot embed conductor {self.M} into {M}")
        step = M // self.M
        poly = [0] * (step * len(self.coeffs))
        for j, c in enumerate(self.coeffs):
            poly[j * step] = c
        return CycNumber.from_poly(M, poly)

    def _coerce(self, other):
        if isinstance(other, CycNumber):
            if other.M == self.M:
                return self, other
            M = lcm(self.M, other.M)
            return self.embed(M), other.embed(M)
        if isinstance(other, (int, Fraction)):
            return self, CycNumber.rational(self.M, other)
        return NotImplemented

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CycNumber(a.M, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.M, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNumber(self.M, [x * other for x in self.coeffs])
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        poly = [Fraction(0)] * (2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        poly[i + j] += x * y
        return CycNumber.from_poly(a.M, poly)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycNumber.rational(self.M, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "CycNumber":
        """Complex conjugation z -> z^-1."""
        return CycNumber(self.M, _apply(self.coeffs, _conj_matrix(self.M)))

    def norm_down(self):
        """Product of all Galois conjugates (a rational number)."""
        out = CycNumber.rational(self.M, 1)
        for a in range(1, self.M):
            if gcd(a, self.M) == 1:
                out = out * self.galois(a)
        assert all(c == 0 for c in out.coeffs[1:])
        return out.coeffs[0]

    def galois(self, a: int) -> "CycNumber":
        """The automorphism z -> z^a."""
        poly = [0] * self.M
        for j, c in enumerate(self.coeffs):
            poly[(j * a) % self.M] += c
        return CycNumber.from_poly(self.M, poly)

    def inverse(self) -> "CycNumber":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        # x^{-1} = (product of the other conjugates) / norm
        rest = CycNumber.rational(self.M, 1)
        for a in range(2, self.M):
            if gcd(a, self.M) == 1:
                rest = rest * self.galois(a)
        n = (self * rest).coeffs[0]
        return rest * (1 / Fraction(n))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.M, self.coeffs))

    def __complex__(self):
        return complex(sum(float(c) * z for c, z in zip(self.coeffs, _embedding(self.M))))

    def to_complex(self) -> complex:
        return complex(self)

    def __repr__(self):
        return f"CycNumber(M={self.M}, {[str(c) for c in self.coeffs]})"

    def to_json(self) -> dict:
        from .lattice import frac_to_str

        return {"M": self.M, "coeffs": [frac_to_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "CycNumber":
        return cls(int(data["M"]), [Fraction(c) for c in data["coeffs"]])


def _apply(coeffs, mat):
    phi = len(coeffs)
    return [sum((coeffs[j] * mat[j][i] for j in range(phi) if coeffs[j]), Fraction(0)) for i in range(phi)]


def e_of(x, M: int) -> CycNumber:
    """e(x) = exp(2 pi i x) as an element of Q(zeta_M)."""
    x = mod1(x)
    if (x * M).denominator != 1:
        raise ConductorMismatch(f"e({x}) does not lie in Q(zeta_{M})")
    return CycNumber.zeta_power(M, int(x * M))


def arith(a: CycNumber, b: CycNumber | None, op: str) -> CycNumber:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown operation {op!r}")


def conductor_for(level: int) -> int:
    return lcm(8, level)


def sqrt_disc(D, sig: int, M: int | None = None) -> CycNumber:
    """The Gauss sum e(-sig/8) * sum_gamma e(q(gamma)), which equals +sqrt|D|.

    Milgram's formula forces both s^2 = |D| and s > 0; either failure means
    the supplied signature does not match the discriminant form.
    """
    M = M or conductor_for(D.level)
    total = CycNumber.rational(M, 0)
    for q in D.q_table:
        total = total + e_of(q, M)
    s = e_of(Fraction(-sig, 8), M) * total
    if s * s != CycNumber.rational(M, D.order):
        raise MilgramViolation(f"Gauss sum squared is not |D| = {D.order}")
    if complex(s).real <= 0:
        raise MilgramViolation(f"Gauss sum is -sqrt|D|: signature {sig} is inconsistent mod 8")
    return s


# matrices ----------------------------------------------------------------

_INT64_SAFE = 1 << 62


def _maxabs(a) -> int:
    if a.size == 0:
        return 0
    return max(abs(int(a.max())), abs(int(a.min())))


def _intdot(a, b):
    """Exact integer matrix product using int64 when overflow is impossible."""
    k = a.shape[-1]
    bound = _maxabs(a) * _maxabs(b) * max(k, 1)
    if bound < _INT64_SAFE:
        return np.dot(a.astype(np.int64), b.astype(np.int64)).astype(object)
    return np.dot(a, b)


class CycMatrix:
    """A matrix over Q(zeta_M): integer slices ``data[:, :, j]`` over ``den``."""

    __slots__ = ("M", "data", "den")

    def __init__(self, M: int, data, den: int = 1, normalize: bool = True):
        self.M = M
        self.data = np.asarray(data, dtype=object)
        self.den = int(den)
        if normalize:
            self._normalize()

    def _normalize(self):
        if self.den < 0:
            self.data = -self.data
            self.den = -self.den
        g = reduce(gcd, (int(x) for x in self.data.flat), self.den)
        if g > 1:
            self.data = np.array([int(x) // g for x in self.data.flat], dtype=object).reshape(self.data.shape)
            self.den //= g

    @property
    def shape(self):
        return self.data.shape[:2]

    @property
    def phi(self):
        return self.data.shape[2]

    # constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, M: int, n: int, m: int | None = None):
        phi, _ = cyclotomic_data(M)
        return cls(M, np.zeros((n, n if m is None else m, phi), dtype=object) * 0, 1, normalize=False)

    @classmethod
    def identity(cls, M: int, n: int):
        out = cls.zeros(M, n)
        for i in range(n):
            out.data[i, i, 0] = 1
        return out

    @classmethod
    def from_entries(cls, M: int, rows):
        """Build from a nested list of CycNumber (or rationals)."""
        phi, _ = cyclotomic_data(M)
        n, m = len(rows), len(rows[0]) if rows else 0
        fr = [[_as_cyc(v, M).coeffs for v in row] for row in rows]
        den = reduce(lcm, (c.denominator for row in fr for cs in row for c in cs), 1)
        data = np.zeros((n, m, phi), dtype=object) * 0
        for i in range(n):
            for j in range(m):
                for t in range(phi):
                    data[i, j, t] = int(fr[i][j][t] * den)
        return cls(M, data, den)

    @classmethod
    def monomial(cls, M: int, perm, exps, scale: CycNumber | None = None):
        """Matrix with column a equal to z^exps[a] e_{perm[a]}, times ``scale``."""
        n = len(perm)
        out = cls.zeros(M, n)
        _, table = cyclotomic_data(M)
        for a in range(n):
            out.data[perm[a], a] = table[exps[a] % M]
        if scale is not None:
            out = out.scale(scale)
        return out

    def entry(self, i: int, j: int) -> CycNumber:
        return CycNumber(self.M, [Fraction(int(c), self.den) for c in self.data[i, j]])

    def entries(self):
        n, m = self.shape
        return [[self.entry(i, j) for j in range(m)] for i in range(n)]

    # arithmetic -------------------------------------------------------
    def _reduce(self, full):
        """Reduce coefficient arrays of length up to M back to phi slots."""
        _, table = cyclotomic_data(self.M)
        L = full.shape[-1]
        shp = full.shape[:-1]
        flat = full.reshape(-1, L)
        out = _intdot(flat, np.array(table[:L], dtype=object))
        return out.reshape(shp + (table.shape[1],))

    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        if other.M != self.M:
            raise ConductorMismatch("conductors differ")
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        phi = self.phi
        full = np.zeros((n, m, 2 * phi - 1), dtype=object) * 0
        for i in range(phi):
            ai = self.data[:, :, i]
            if not ai.any():
                continue
            for j in range(phi):
                bj = other.data[:, :, j]
                if not bj.any():
                    continue
                full[:, :, i + j] += _intdot(ai, bj)
        return CycMatrix(self.M, self._reduce(full), self.den * other.den)

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        den = lcm(self.den, other.den)
        data = self.data * (den // self.den) + other.data * (den // other.den)
        return CycMatrix(self.M, data, den)

    def __neg__(self):
        return CycMatrix(self.M, -self.data, self.den, normalize=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CycMatrix":
        c = _as_cyc(c, self.M)
        cden = reduce(lcm, (x.denominator for x in c.coeffs), 1)
        cnum = [int(x * cden) for x in c.coeffs]
        # multiplication by c as a phi x phi integer matrix on row vectors
        phi = self.phi
        mult = np.zeros((phi, phi), dtype=object) * 0
        for j in range(phi):
            row = [0] * (2 * phi)
            for t, v in enumerate(cnum):
                row[j + t] += v
            mult[j] = self._reduce(np.array(row[: 2 * phi - 1], dtype=object).reshape(1, 1, -1))[0, 0]
        n, m = self.shape
        data = _intdot(self.data.reshape(-1, phi), mult).reshape(n, m, phi)
        return CycMatrix(self.M, data, self.den * cden)

    def zeta_rows(self, exps) -> "CycMatrix":
        """Multiply row i by z^exps[i]."""
        out = np.empty_like(self.data)
        for i, a in enumerate(exps):
            out[i] = _intdot(self.data[i], _shift_matrix(self.M, a % self.M))
        return CycMatrix(self.M, out, self.den, normalize=False)

    def permute_rows(self, perm) -> "CycMatrix":
        """Row perm[i] of the result is row i of self."""
        out = np.empty_like(self.data)
        for i, p in enumerate(perm):
            out[p] = self.data[i]
        return CycMatrix(self.M, out, self.den, normalize=False)

    def conj_transpose(self) -> "CycMatrix":
        n, m = self.shape
        cm = _conj_matrix(self.M)
        data = _intdot(self.data.reshape(-1, self.phi), cm).reshape(n, m, self.phi)
        return CycMatrix(self.M, data.transpose(1, 0, 2).copy(), self.den, normalize=False)

    def kron(self, other: "CycMatrix") -> "CycMatrix":
        n1, m1 = self.shape
        n2, m2 = other.shape
        phi = self.phi
        full = np.zeros((n1 * n2, m1 * m2, 2 * phi - 1), dtype=object) * 0
        for i in range(phi):
            for j in range(phi):
                full[:, :, i + j] += np.kron(self.data[:, :, i], other.data[:, :, j])
        return CycMatrix(self.M, self._reduce(full), self.den * other.den)

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        a, b = self, other
        a._normalize()
        b._normalize()
        return a.M == b.M and a.den == b.den and a.data.shape == b.data.shape and (a.data == b.data).all()

    def __hash__(self):
        self._normalize()
        return hash((self.M, self.den, tuple(int(x) for x in self.data.flat)))

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and self == CycMatrix.identity(self.M, n)

    def to_complex(self) -> np.ndarray:
        emb = _embedding(self.M)
        return np.tensordot(self.data.astype(float), emb, axes=([2], [0])) / self.den

    def column(self, j: int):
        return [self.entry(i, j) for i in range(self.shape[0])]

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.entries()]


def _as_cyc(v, M: int) -> CycNumber:
    if isinstance(v, CycNumber):
        return v.embed(M)
    return CycNumber.rational(M, v)
