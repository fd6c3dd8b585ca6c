"""The metaplectic group Mp_2g(Z).

An element is a symplectic integer matrix together with a holomorphic
square root phi of tau -> det(C tau + D).  Since the Siegel upper half
space is simply connected, phi is pinned down by its value at the base
point tau0 = i*I, which we store as a sign relative to the principal
square root of det(C*i + D) (a nonzero Gaussian integer).
"""

from __future__ import annotations

import cmath
import json
import random
from dataclasses import dataclass

import numpy as np

from . import intmat


class NotSymplectic(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class NotUnimodular(ValueError):
    pass


class NotInParabolic(ValueError):
    pass


class BoundExceeded(RuntimeError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


def symplectic_form(g: int):
    J = np.zeros((2 * g, 2 * g), dtype=object) * 0
    J[:g, g:] = -intmat.identity(g)
    J[g:, :g] = intmat.identity(g)
    return J


def is_symplectic(M) -> bool:
    M = intmat.as_int_matrix(M)
    n = M.shape[0]
    if M.shape != (n, n) or n % 2:
        return False
    J = symplectic_form(n // 2)
    return (M.T.dot(J).dot(M) == J).all()


def _blocks(M, g):
    return M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:]


def act(M, tau):
    """Action (A tau + B)(C tau + D)^{-1} of a real symplectic matrix on H_g."""
    M = np.asarray(M, dtype=float)
    g = M.shape[0] // 2
    A, B, C, D = _blocks(M, g)
    tau = np.asarray(tau, dtype=complex)
    out = np.linalg.solve((C @ tau + D).T, (A @ tau + B).T).T
    return (out + out.T) / 2


def base_point(g: int):
    return 1j * np.eye(g)


def check_siegel_point(tau):
    """Validate symmetry and positive definiteness of the imaginary part."""
    tau = np.asarray(tau, dtype=complex)
    if tau.ndim != 2 or tau.shape[0] != tau.shape[1] or not np.allclose(tau, tau.T):
        raise ValueError("tau must be a symmetric square matrix")
    np.linalg.cholesky(tau.imag)
    return tau


def _principal_sqrt(z: complex) -> complex:
    return cmath.sqrt(z)


def _gauss_det(C, D) -> complex:
    """det(C*i + D), exact for the small integer matrices we handle."""
    g = C.shape[0]
    if g == 0:
        return 1 + 0j
    z = np.linalg.det(np.asarray(C, dtype=float) * 1j + np.asarray(D, dtype=float))
    return complex(round(z.real), round(z.imag))


def _continue_sqrt(C, D, tau_start, tau_end, w_start):
    """Continue a square root of det(C tau + D) along a straight segment."""
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if not C.any():
        return w_start

    def f(t):
        return np.linalg.det(C @ (tau_start + t * (tau_end - tau_start)) + D)

    t, w, ft = 0.0, w_start, f(0.0)
    h = 1.0 / 16
    while t < 1.0:
        h = min(h, 1.0 - t)
        for _ in range(60):
            fn = f(t + h)
            fm = f(t + h / 2)
            if abs(fn / ft - 1) < 0.3 and abs(fm / ft - 1) < 0.3:
                break
            h /= 2
        else:
            raise PrecisionExhausted("square root continuation did not converge")
        r = _principal_sqrt(fn)
        w = r if abs(r - w) <= abs(r + w) else -r
        t, ft = t + h, fn
        h *= 2
    return w


@dataclass(frozen=True)
class MpElement:
    """(M, phi) with phi(i*I) = (-1)^branch * sqrt_principal(det(C i + D))."""

    matrix: tuple
    branch: int = 0

    def __post_init__(self):
        object.__setattr__(self, "branch", int(self.branch) % 2)

    @classmethod
    def make(cls, M, branch=0, check=True):
        M = intmat.as_int_matrix(M)
        if check and not is_symplectic(M):
            raise NotSymplectic("matrix is not symplectic")
        return cls(intmat.to_key(M), branch)

    @property
    def genus(self) -> int:
        return len(self.matrix) // 2

    @property
    def M(self):
        return intmat.as_int_matrix(self.matrix)

    def blocks(self):
        return _blocks(self.M, self.genus)

    def phi_base(self) -> complex:
        """Value of phi at the base point i*I."""
        _, _, C, D = self.blocks()
        r = _principal_sqrt(_gauss_det(C, D))
        return -r if self.branch else r

    def phi(self, tau) -> complex:
        """Value of the square root function at tau in H_g."""
        g = self.genus
        _, _, C, D = self.blocks()
        tau = np.asarray(tau, dtype=complex).reshape(g, g)
        if g == 1:
            c, d = int(C[0, 0]), int(D[0, 0])
            base = _principal_sqrt(complex(d, c))
            sign = 1 if abs(self.phi_base() - base) < abs(self.phi_base() + base) else -1
            return sign * _principal_sqrt(c * tau[0, 0] + d)
        return _continue_sqrt(C, D, base_point(g), tau, self.phi_base())

    def act(self, tau):
        return act(self.M, tau)

    def __mul__(self, other: "MpElement") -> "MpElement":
        return compose(self, other)

    def inverse(self) -> "MpElement":
        g = self.genus
        A, B, C, D = self.blocks()
        Minv = np.block([[D.T, -B.T], [-C.T, A.T]])
        cand = MpElement(intmat.to_key(Minv), 0)
        if compose(self, cand) == identity(g):
            return cand
        return MpElement(cand.matrix, 1)

    def __pow__(self, n: int) -> "MpElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = identity(self.genus)
        for _ in range(n):
            out = out * self
        return out

    def to_json(self):
        return {"matrix": [list(r) for r in self.matrix], "branch": self.branch}


def _branch_from_value(C, D, value: complex) -> int:
    r = _principal_sqrt(_gauss_det(C, D))
    plus, minus = abs(value - r), abs(value + r)
    # the candidates are 2|r| >= 2 apart, so anything near the midpoint is a bug
    if min(plus, minus) > 0.5 * abs(r):
        raise PrecisionExhausted("branch of the square root is undecidable")
    return 0 if plus < minus else 1


def compose(g1: MpElement, g2: MpElement) -> MpElement:
    """(M1, phi1)(M2, phi2) = (M1 M2, phi1(M2 tau) phi2(tau))."""
    if g1.genus != g2.genus:
        raise ValueError("genus mismatch")
    g = g1.genus
    M = g1.M.dot(g2.M)
    _, _, C, D = _blocks(M, g)
    v = g1.phi(g2.act(base_point(g))) * g2.phi_base()
    return MpElement(intmat.to_key(M), _branch_from_value(C, D, v))


# generators ----------------------------------------------------------------


def identity(g: int) -> MpElement:
    return MpElement(intmat.to_key(intmat.identity(2 * g)), 0)


def center(g: int) -> MpElement:
    """The nontrivial central element (I, -1)."""
    return MpElement(intmat.to_key(intmat.identity(2 * g)), 1)


def gen_S(g: int) -> MpElement:
    """S with phi(tau) = sqrt(det tau), normalized as e(g/8) sqrt(det(tau/i)).

    For g <= 2 this is the principal root of det(i*I) at the base point; the
    normalization keeps iota(S_r, S_{g-r}) = S_g for all genera.
    """
    M = symplectic_form(g)
    target = cmath.exp(2j * cmath.pi * g / 8)
    return MpElement(intmat.to_key(M), _branch_from_value(M[g:, :g], M[g:, g:], target))


def gen_T(B) -> MpElement:
    B = intmat.as_int_matrix(B)
    if not (B == B.T).all():
        raise NotSymmetric("B must be symmetric")
    g = B.shape[0]
    M = intmat.identity(2 * g)
    M[:g, g:] = B
    return MpElement(intmat.to_key(M), 0)


def gen_R(A) -> MpElement:
    """R_A = ((A, 0; 0, A^-t), principal sqrt(det A))."""
    A = intmat.as_int_matrix(A)
    if not intmat.is_unimodular(A):
        raise NotUnimodular("A must lie in GL_g(Z)")
    g = A.shape[0]
    M = np.zeros((2 * g, 2 * g), dtype=object) * 0
    M[:g, :g] = A
    M[g:, g:] = intmat.int_inverse(A).T
    return MpElement(intmat.to_key(M), 0)


def generators(g: int, kind: str, arg=None) -> MpElement:
    if kind == "S":
        return gen_S(g)
    if kind == "T":
        return gen_T(arg)
    if kind == "R":
        return gen_R(arg)
    raise ValueError(f"unknown generator {kind!r}")


def iota(gam: MpElement, gam2: MpElement) -> MpElement:
    """Block embedding Mp_2r x Mp_2(g-r) -> Mp_2g with phi~(diag) = phi * phi'."""
    r, s = gam.genus, gam2.genus
    g = r + s
    A, B, C, D = gam.blocks()
    A2, B2, C2, D2 = gam2.blocks()
    M = np.zeros((2 * g, 2 * g), dtype=object) * 0
    M[:r, :r], M[:r, g : g + r], M[g : g + r, :r], M[g : g + r, g : g + r] = A, B, C, D
    M[r:g, r:g], M[r:g, g + r :], M[g + r :, r:g], M[g + r :, g + r :] = A2, B2, C2, D2
    value = gam.phi_base() * gam2.phi_base()
    return MpElement(intmat.to_key(M), _branch_from_value(M[g:, :g], M[g:, g:], value))


def in_klingen_parabolic(M, r: int) -> bool:
    M = intmat.as_int_matrix(M)
    g = M.shape[0] // 2
    A, B, C, D = _blocks(M, g)
    return (
        not A[:r, r:].any()
        and not C[:r, r:].any()
        and not C[r:, :].any()
        and not D[r:, :r].any()
    )


def klingen_star(gam: MpElement, r: int) -> MpElement:
    """Projection P_{g,r} -> Mp_2r with phi = sqrt(det D4) * phi*, principal root."""
    g = gam.genus
    M = gam.M
    if not in_klingen_parabolic(M, r):
        raise NotInParabolic("element is not in the Klingen parabolic")
    A, B, C, D = _blocks(M, g)
    star = np.block([[A[:r, :r], B[:r, :r]], [C[:r, :r], D[:r, :r]]]) if r else np.zeros((0, 0), dtype=object)
    d4 = int(intmat.det(D[r:, r:]))
    value = gam.phi_base() / _principal_sqrt(complex(d4))
    if r == 0:
        return MpElement((), 0)
    return MpElement(intmat.to_key(star), _branch_from_value(C[:r, :r], D[:r, :r], value))


# words -----------------------------------------------------------------------


def letter_element(g: int, letter) -> MpElement:
    kind, arg = letter
    return generators(g, kind, arg)


def recompose(g: int, word, flips: int = 0) -> MpElement:
    out = identity(g)
    for letter in word:
        out = out * letter_element(g, letter)
    if flips % 2:
        out = out * center(g)
    return out


def word_to_json(word, flips: int = 0) -> str:
    letters = []
    for kind, arg in word:
        letters.append({kind: None if arg is None else [[int(x) for x in row] for row in np.asarray(arg).tolist()]})
    return json.dumps({"word": letters, "branch_flip": int(flips)})


def word_from_json(text):
    data = json.loads(text) if isinstance(text, str) else text
    if isinstance(data, list):
        data = {"word": data, "branch_flip": 0}
    word = []
    for item in data["word"]:
        ((kind, arg),) = item.items()
        word.append((kind, None if arg is None else intmat.as_int_matrix(arg)))
    return word, int(data.get("branch_flip", 0))


def _apply_right(M, letter, g):
    kind, arg = letter
    if kind == "S":
        X = symplectic_form(g)
    elif kind == "T":
        X = gen_T(arg).M
    else:
        X = gen_R(arg).M
    return M.dot(X)


def _apply_left(letter, M, g):
    return gen_R(letter[1]).M.dot(M)


def _invert_letter(letter):
    kind, arg = letter
    if kind == "S":
        return [("S", None)] * 3
    if kind == "T":
        return [("T", -arg)]
    return [("R", intmat.int_inverse(arg))]


def _round_half(x) -> int:
    # round half away from zero, deterministic for Fractions
    n = x.numerator
    d = x.denominator
    q, r = divmod(2 * n + d, 2 * d)
    return q


def _simplify(word, g):
    out = []
    for kind, arg in word:
        if kind == "T" and not np.asarray(arg).any():
            continue
        if kind == "R" and (np.asarray(arg) == intmat.identity(g)).all():
            continue
        if out and kind == "T" and out[-1][0] == "T":
            merged = out[-1][1] + arg
            out.pop()
            if np.asarray(merged).any():
                out.append(("T", merged))
            continue
        out.append((kind, arg))
        # S^4 is central, so runs of four S letters only move the branch
        if len(out) >= 4 and all(k == "S" for k, _ in out[-4:]):
            del out[-4:]
    return out


MAX_DECOMPOSE_GENUS = 3


def decompose(gam: MpElement, max_steps: int = 500):
    """Word in S, T_B, R_A and a central power whose product is ``gam``.

    The reduction drives the C block to zero: a Smith step brings C to
    diag(C11, 0), a translation reduces C11^{-1} D11 into [-1/2, 1/2], and
    a partial block swap then replaces C11 by a matrix of strictly smaller
    determinant (or smaller rank).
    """
    g = gam.genus
    if g > MAX_DECOMPOSE_GENUS:
        raise BoundExceeded(f"decomposition is supported for genus <= {MAX_DECOMPOSE_GENUS}")
    M = gam.M.copy()
    left, right = [], []
    prev = None
    for _ in range(max_steps):
        C = M[g:, :g]
        if not C.any():
            break
        diag, U, V = intmat.smith(C)
        # left multiplication by R_X sends C to X^{-t} C; take X^{-t} = U
        lt = ("R", intmat.int_inverse(U).T.copy())
        M = _apply_left(lt, M, g)
        left.append(lt)
        rt = ("R", V)
        M = _apply_right(M, rt, g)
        right.append(rt)
        C = M[g:, :g]
        D = M[g:, g:]
        nu = sum(1 for d in diag if d)
        measure = (nu, abs(int(intmat.det(C[:nu, :nu]))))
        if prev is not None and not measure < prev:
            raise BoundExceeded("reduction failed to decrease")
        prev = measure
        C11 = intmat.as_frac_matrix(C[:nu, :nu])
        P = intmat.inverse(C11).dot(intmat.as_frac_matrix(D[:nu, :nu]))
        Y = np.zeros((g, g), dtype=object) * 0
        for i in range(nu):
            for j in range(nu):
                Y[i, j] = -_round_half(P[i, j])
        if Y.any():
            t = ("T", Y)
            M = _apply_right(M, t, g)
            right.append(t)
        for i in range(nu):
            E = np.zeros((g, g), dtype=object) * 0
            E[i, i] = 1
            for letter in [("T", -E), ("S", None), ("S", None), ("S", None), ("T", -E), ("S", None), ("T", -E)]:
                M = _apply_right(M, letter, g)
                right.append(letter)
    else:
        raise BoundExceeded("too many reduction steps")
    A = M[:g, :g]
    B = M[:g, g:]
    X = intmat.as_int_matrix(intmat.inverse(A).dot(B))
    core = [("R", A.copy()), ("T", X)]
    word = []
    for letter in left:
        word.extend(_invert_letter(letter))
    word.extend(core)
    for letter in reversed(right):
        word.extend(_invert_letter(letter))
    word = _simplify(word, g)
    rebuilt = recompose(g, word)
    if rebuilt.matrix != gam.matrix:
        raise AssertionError("decomposition does not reproduce the matrix")
    return word, (rebuilt.branch - gam.branch) % 2


def random_unimodular(g: int, rng: random.Random, steps: int = 3):
    A = intmat.identity(g)
    for _ in range(steps):
        i, j = rng.sample(range(g), 2) if g > 1 else (0, 0)
        E = intmat.identity(g)
        if g > 1 and rng.random() < 0.6:
            E[i, j] = rng.choice([-1, 1])
        else:
            E[i, i] = -1
        A = A.dot(E)
    return A


def random_symmetric(g: int, rng: random.Random, size: int = 2):
    B = np.zeros((g, g), dtype=object) * 0
    for i in range(g):
        for j in range(i, g):
            B[i, j] = B[j, i] = rng.randint(-size, size)
    return B


def random_word(g: int, rng: random.Random, max_len: int = 12):
    word = []
    for _ in range(rng.randint(1, max_len)):
        u = rng.random()
        if u < 0.4:
            word.append(("S", None))
        elif u < 0.8:
            word.append(("T", random_symmetric(g, rng)))
        else:
            word.append(("R", random_unimodular(g, rng)))
    return word
