"""The genus-g Weil representation on C[D^g].

Generator images follow the standard formulas with the phase
sqrt(i)^{g(2-n)} written as e(-g*sig/8), sig = b+ - b-, so any signature
is allowed.  R_A acts by (sqrt det A)^{-sig} e_{alpha A^{-1}} with the
principal root, which is the value attached to the element R_A of the
metaplectic group; with this reading rho((I,-1)) = (-1)^sig.
"""

from __future__ import annotations

import hashlib
import os
import pickle
import threading
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import intmat
from .cyclotomic import CycMatrix, CycNumber, _intdot, _shift_matrix, conductor_for, e_of, sqrt_disc
from .lattice import EvenLattice, discriminant_group, enumerate_tuples, moment_trace
from .metaplectic import MpElement, decompose, gen_R


class WeilRep:
    """rho_L^g with an ``exact`` (cyclotomic) or ``numeric`` (complex) backend."""

    def __init__(self, lattice: EvenLattice, g: int, backend: str = "exact"):
        if backend not in ("exact", "numeric"):
            raise ValueError("backend must be 'exact' or 'numeric'")
        self.lattice = lattice
        self.D = discriminant_group(lattice)
        self.g = g
        self.backend = backend
        self.sig = lattice.signature
        self.M = conductor_for(self.D.level)
        self.dim = self.D.order**g
        self.tuples = list(enumerate_tuples(self.D, g))
        self._cache = {}
        self._lock = threading.Lock()
        self._sqrt = sqrt_disc(self.D, self.sig, self.M)
        # exponents of the genus-1 S kernel: e(-(beta, alpha)) = z^E[beta, alpha]
        d = self.D.order
        self._s_exps = [[int((-self.D.b(b, a) * self.M) % self.M) for a in range(d)] for b in range(d)]

    # scalars --------------------------------------------------------------
    def _s_scale(self) -> CycNumber:
        """e(-g sig/8) / |D|^{g/2}, using 1/s = s/|D| for the Gauss sum s."""
        c = e_of(Fraction(-self.g * self.sig, 8), self.M)
        inv_s = self._sqrt * Fraction(1, self.D.order)
        return c * inv_s**self.g

    def _r_exponent(self, A) -> int:
        """Exponent a with (sqrt det A)^{-sig} = z^a (principal root)."""
        if int(intmat.det(A)) == 1:
            return 0
        return (-self.sig * self.M // 4) % self.M

    def center_sign(self) -> int:
        return -1 if self.sig % 2 else 1

    # monomial descriptions ---------------------------------------------------
    def _t_exps(self, B):
        return [int(moment_trace(self.D, a, B) * self.M) for a in self.tuples]

    def _r_perm(self, A):
        Ainv = intmat.int_inverse(A)
        return [self.D.tuple_index(self.D.tuple_times_matrix(a, Ainv)) for a in self.tuples]

    # generator images ----------------------------------------------------------
    def _cached(self, key, build):
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = build()
        with self._lock:
            self._cache.setdefault(key, value)
            return self._cache[key]

    def rho_T(self, B):
        B = intmat.as_int_matrix(B)
        if not (B == B.T).all():
            raise ValueError("B must be symmetric")

        def build():
            exps = self._t_exps(B)
            if self.backend == "exact":
                return CycMatrix.monomial(self.M, list(range(self.dim)), exps)
            return np.diag(np.exp(2j * np.pi * np.array(exps) / self.M))

        return self._cached(("T", intmat.to_key(B)), build)

    def rho_R(self, A):
        A = intmat.as_int_matrix(A)
        gen_R(A)  # validates unimodularity

        def build():
            perm = self._r_perm(A)
            a = self._r_exponent(A)
            if self.backend == "exact":
                return CycMatrix.monomial(self.M, perm, [a] * self.dim)
            out = np.zeros((self.dim, self.dim), dtype=complex)
            out[perm, np.arange(self.dim)] = np.exp(2j * np.pi * a / self.M)
            return out

        return self._cached(("R", intmat.to_key(A)), build)

    def rho_S(self):
        def build():
            disk = _disk_cache_path(self)
            if disk is not None and disk.exists():
                with open(disk, "rb") as fh:
                    return pickle.load(fh)
            if self.backend == "exact":
                value = self.apply_S(CycMatrix.identity(self.M, self.dim))
            else:
                one = np.exp(2j * np.pi * np.array(self._s_exps) / self.M)
                value = np.ones((1, 1), dtype=complex)
                for _ in range(self.g):
                    value = np.kron(value, one)
                value = value * complex(self._s_scale())
            if disk is not None:
                disk.parent.mkdir(parents=True, exist_ok=True)
                with open(disk, "wb") as fh:
                    pickle.dump(value, fh)
            return value

        return self._cached(("S",), build)

    def rho_center(self):
        if self.backend == "exact":
            return CycMatrix.identity(self.M, self.dim).scale(self.center_sign())
        return self.center_sign() * np.eye(self.dim, dtype=complex)

    def identity(self):
        if self.backend == "exact":
            return CycMatrix.identity(self.M, self.dim)
        return np.eye(self.dim, dtype=complex)

    # products ------------------------------------------------------------------
    def apply_S(self, X: CycMatrix) -> CycMatrix:
        """rho(S) X exactly, contracting one tensor factor at a time."""
        d = self.D.order
        n, m = X.shape
        phi = X.phi
        data = X.data.reshape((d,) * self.g + (m, phi))
        for axis in range(self.g):
            moved = np.moveaxis(data, axis, 0)
            rest = moved.shape[1:]
            flat = moved.reshape(d, -1, phi)
            out = np.zeros_like(flat)
            for b in range(d):
                acc = out[b]
                for a in range(d):
                    if flat[a].any():
                        acc = acc + _intdot(flat[a], _shift_matrix(self.M, self._s_exps[b][a]))
                out[b] = acc
            data = np.moveaxis(out.reshape((d,) + rest), 0, axis)
        Y = CycMatrix(self.M, np.ascontiguousarray(data).reshape(n, m, phi), X.den)
        return Y.scale(self._s_scale())

    def _apply_letter(self, letter, X):
        kind, arg = letter
        if self.backend == "numeric":
            return self.letter_matrix(letter) @ X
        if kind == "S":
            return self.apply_S(X)
        if kind == "T":
            return X.zeta_rows(self._t_exps(intmat.as_int_matrix(arg)))
        A = intmat.as_int_matrix(arg)
        perm = self._r_perm(A)
        a = self._r_exponent(A)
        return X.permute_rows(perm).zeta_rows([a] * self.dim)

    def letter_matrix(self, letter):
        kind, arg = letter
        if kind == "S":
            return self.rho_S()
        if kind == "T":
            return self.rho_T(arg)
        return self.rho_R(arg)

    def rho_word(self, word, flips: int = 0):
        """Image of the product of letters (and ``flips`` central factors)."""
        X = self.identity()
        for letter in reversed(word):
            X = self._apply_letter(letter, X)
        if flips % 2 and self.center_sign() == -1:
            X = -X
        return X

    def rho_of(self, gam: MpElement):
        if gam.genus != self.g:
            raise ValueError("genus mismatch")
        word, flips = decompose(gam)
        return self.rho_word(word, flips)


def is_unitary(X) -> bool:
    if isinstance(X, CycMatrix):
        return (X @ X.conj_transpose()).is_identity()
    return np.allclose(X @ X.conj().T, np.eye(X.shape[0]))


def kron(X, Y):
    if isinstance(X, CycMatrix):
        return X.kron(Y)
    return np.kron(X, Y)


def _disk_cache_path(rep: WeilRep):
    root = os.environ.get("WEILREP_CACHE_DIR")
    if not root:
        return None
    key = hashlib.sha256(repr((rep.lattice.gram, rep.g, rep.backend)).encode()).hexdigest()[:24]
    return Path(root) / f"rhoS-{key}.pkl"


def inner_product(v, w):
    """<v, w> = sum v_a conj(w_a) on C[D^g]."""
    acc = None
    for a, b in zip(v, w):
        term = a * (b.conj() if isinstance(b, CycNumber) else np.conj(b))
        acc = term if acc is None else acc + term
    return acc
