"""Coprime symmetric pairs, their rank strata, and the genus-2 Eisenstein series.

A pair (C, D) of g x g integer matrices lies in ST(g) when C D^t is
symmetric and the g x g minors of (C | D) are coprime; GL(g, Z) acts on
the left.  ST(g, nu) is the stratum with rank C = nu.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import intmat
from .expansion import GenusUnsupported, TruncatedExpansion, essential_complement, essential_part  # noqa: F401  (re-exported)
from .lattice import EvenLattice, discriminant_group
from .metaplectic import BoundExceeded, MpElement, is_symplectic
from .series import SeriesConfig, eisenstein_genus1
from .weilrep import WeilRep

MAX_CELLS = 6_000_000


@dataclass(frozen=True)
class SymPair:
    C: tuple
    D: tuple

    @classmethod
    def make(cls, C, D):
        return cls(intmat.to_key(intmat.as_int_matrix(C)), intmat.to_key(intmat.as_int_matrix(D)))

    @property
    def genus(self) -> int:
        return len(self.C)

    @property
    def block(self):
        return np.concatenate([intmat.as_int_matrix(self.C), intmat.as_int_matrix(self.D)], axis=1)

    @property
    def rank(self) -> int:
        return intmat.rank(self.C)

    def height(self) -> int:
        return intmat.height(self.block)

    def is_valid(self) -> bool:
        C, D = intmat.as_int_matrix(self.C), intmat.as_int_matrix(self.D)
        P = C.dot(D.T)
        return (P == P.T).all() and intmat.minors_gcd(self.block) == 1


# enumeration -------------------------------------------------------------------


def _minors_gcd_batch(blocks: np.ndarray) -> np.ndarray:
    """gcd of maximal minors for a stack of g x 2g int64 blocks (g <= 2)."""
    n, g, w = blocks.shape
    if g == 1:
        return np.gcd.reduce(np.abs(blocks[:, 0, :]), axis=1)
    out = np.zeros(n, dtype=np.int64)
    for i, j in itertools.combinations(range(w), 2):
        m = blocks[:, 0, i] * blocks[:, 1, j] - blocks[:, 0, j] * blocks[:, 1, i]
        out = np.gcd(out, np.abs(m))
    return out


def _rank_batch(C: np.ndarray) -> np.ndarray:
    g = C.shape[1]
    nonzero = np.any(C.reshape(len(C), -1) != 0, axis=1).astype(int)
    if g == 1:
        return nonzero
    det = C[:, 0, 0] * C[:, 1, 1] - C[:, 0, 1] * C[:, 1, 0]
    return np.where(det != 0, 2, nonzero)


def enumerate_ST(g: int, H: int, stratify: bool = True):
    """All pairs in ST(g) with entries in [-H, H], as (SymPair, rank C).

    The output order is lexicographic in the flattened (C, D) entries.
    """
    if g not in (1, 2):
        raise GenusUnsupported("enumeration supports g <= 2")
    side = 2 * H + 1
    if side ** (2 * g * g) > MAX_CELLS:
        raise BoundExceeded(f"window of height {H} is too large for genus {g}")
    vals = np.arange(-H, H + 1, dtype=np.int64)
    mats = np.array(list(itertools.product(vals, repeat=g * g)), dtype=np.int64).reshape(-1, g, g)
    nm = len(mats)
    Ci = np.repeat(np.arange(nm), nm)
    Di = np.tile(np.arange(nm), nm)
    C, D = mats[Ci], mats[Di]
    P = np.einsum("nij,nkj->nik", C, D)
    sym = np.all(P == np.transpose(P, (0, 2, 1)), axis=(1, 2))
    C, D = C[sym], D[sym]
    ok = _minors_gcd_batch(np.concatenate([C, D], axis=2)) == 1
    C, D = C[ok], D[ok]
    ranks = _rank_batch(C)
    for c, d, r in zip(C, D, ranks):
        yield SymPair(intmat.to_key(c.astype(object)), intmat.to_key(d.astype(object))), int(r)


def stratify(pairs):
    """Group (pair, rank) items by rank."""
    out = {}
    for p, r in pairs:
        out.setdefault(r, []).append(p)
    return out


def gl_canonical(pair: SymPair) -> tuple:
    """Row Hermite form of (C | D): a complete invariant of the left GL orbit."""
    H, _ = intmat.row_hnf(pair.block)
    return intmat.to_key(H)


# representatives of GL(g)\ST(g, nu) ----------------------------------------------


def _normalise_sign(v):
    v = [int(x) for x in v]
    first = next((x for x in v if x), 0)
    return tuple(-x for x in v) if first < 0 else tuple(v)


def primitive_vectors(g: int, bound: int):
    """Primitive vectors with entries in [-bound, bound], one per +- pair."""
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=g):
        if any(v) and math.gcd(*v) == 1 and _normalise_sign(v) == v:
            out.append(v)
    return out


def w_completion(w) -> np.ndarray:
    """A determinant-one matrix with first column w; it represents W GL(g)_1."""
    W = intmat.complete_columns(intmat.as_int_matrix(list(w)).reshape(-1, 1))
    if intmat.det(W) == -1:
        W[:, -1] = -W[:, -1]
    return W


def representative(nu: int, C1, D1, W) -> SymPair:
    """((C1 0; 0 0) W^t, (D1 0; 0 I) W^{-1})."""
    W = intmat.as_int_matrix(W)
    g = W.shape[0]
    Cb, Db = intmat.zeros(g), intmat.zeros(g)
    if nu:
        Cb[:nu, :nu] = intmat.as_int_matrix(C1)
        Db[:nu, :nu] = intmat.as_int_matrix(D1)
    for i in range(nu, g):
        Db[i, i] = 1
    return SymPair.make(Cb.dot(W.T), Db.dot(intmat.int_inverse(W)))


def decompose_rank_one(pair: SymPair):
    """(c, d, w) with pair associated to the representative built from them (g = 2)."""
    C, D = intmat.as_int_matrix(pair.C), intmat.as_int_matrix(pair.D)
    rows = [r for r in C.tolist() if any(r)]
    row = rows[0]
    w = _normalise_sign([x // math.gcd(*row) for x in row])
    W = w_completion(w)
    Cpp = C.dot(intmat.int_inverse(W).T)
    Dpp = D.dot(W)
    # first column of Cpp is x; the left move sending x to (gcd, 0)
    x = [int(v) for v in Cpp[:, 0]]
    U = intmat.int_inverse(intmat.complete_columns(intmat.as_int_matrix([v // math.gcd(*x) for v in x]).reshape(-1, 1)))
    Cpp, Dpp = U.dot(Cpp), U.dot(Dpp)
    if Cpp[0, 0] < 0:
        Cpp, Dpp = -Cpp, -Dpp
    c, d = int(Cpp[0, 0]), int(Dpp[0, 0])
    return c, d, w


def setofrep_candidates(g: int, nu: int, H: int):
    """Candidate representatives within a parameter window of size H."""
    if g != 2:
        raise GenusUnsupported("setofrep candidates are implemented for g = 2")
    if nu == 0:
        return [SymPair.make(intmat.zeros(2), intmat.identity(2))]
    if nu == 1:
        out = []
        for w in primitive_vectors(2, H):
            W = w_completion(w)
            for c in range(1, H + 1):
                for d in range(-H * H, H * H + 1):
                    if math.gcd(c, d) == 1:
                        out.append(representative(1, [[c]], [[d]], W))
        return out
    if nu == 2:
        out = []
        for C in hnf_matrices(H):
            for ent in itertools.product(range(-H * H, H * H + 1), repeat=4):
                D = intmat.as_int_matrix(np.array(ent, dtype=object).reshape(2, 2))
                P = C.dot(D.T)
                if (P == P.T).all() and intmat.minors_gcd(np.concatenate([C, D], axis=1)) == 1:
                    out.append(SymPair.make(C, D))
        return out
    raise ValueError("nu must be 0, 1 or 2")


def hnf_matrices(H: int):
    """Nonsingular 2 x 2 row-Hermite forms (a, b; 0, e) with a, e <= H, 0 <= b < e."""
    out = []
    for a in range(1, H + 1):
        for e in range(1, H + 1):
            for b in range(e):
                out.append(intmat.as_int_matrix([[a, b], [0, e]]))
    return out


def setofrep_check(g: int, nu: int, H: int) -> dict:
    """Check the representative set for GL(2)\\ST(2, nu) inside a window.

    Candidates come from the parameter window H; coverage is tested on
    every enumerated pair of height at most h = max(1, floor(sqrt(H/2))),
    for which the canonical forms provably fall inside the window.
    """
    if g != 2 or nu not in (0, 1, 2):
        raise GenusUnsupported("setofrep_check supports g = 2, nu in {0, 1, 2}")
    cands = setofrep_candidates(g, nu, H)
    invalid = [p for p in cands if not (p.is_valid() and p.rank == nu)]
    seen, dups = {}, []
    for p in cands:
        key = gl_canonical(p)
        if key in seen:
            dups.append((seen[key], p))
        else:
            seen[key] = p
    h = max(1, math.isqrt(H // 2))
    stream = [p for p, r in enumerate_ST(g, h) if r == nu]
    uncovered = [p for p in stream if gl_canonical(p) not in seen]
    return {
        "g": g,
        "nu": nu,
        "H": H,
        "induced_height": h,
        "candidates": len(cands),
        "invalid": len(invalid),
        "duplicate_orbits": len(dups),
        "checked_pairs": len(stream),
        "uncovered_orbits": len({gl_canonical(p) for p in uncovered}),
        "ok": not invalid and not dups and not uncovered,
    }


# primitivity ---------------------------------------------------------------------


def is_primitive(W) -> bool:
    return intmat.is_primitive(W)


def mstar_completion(W, g: int):
    """V in GL(g, Z) with upper-left block W, or None if none exists.

    Such V exists iff det W != 0 and for every prime p the p-rank of W is
    at least 2r - g, i.e. the Smith invariants s_1..s_{2r-g} are 1.
    """
    W = intmat.as_int_matrix(W)
    r = W.shape[0]
    if W.shape != (r, r) or r > g:
        raise ValueError("W must be square of size at most g")
    if intmat.det(W) == 0:
        return None
    if r == g:
        return W.copy() if intmat.is_unimodular(W) else None
    diag, U, V = intmat.smith(W)
    need = 2 * r - g
    if any(abs(int(s)) != 1 for s in diag[:max(need, 0)]):
        return None
    # (S | X') with X' = (0; I_{g-r}) on the last g-r rows is primitive
    Xp = intmat.zeros(r, g - r)
    for j in range(g - r):
        Xp[r - (g - r) + j, j] = 1
    X = intmat.int_inverse(U).dot(Xp)
    rows = np.concatenate([W, X], axis=1)
    full = intmat.complete_rows(rows)
    assert (full[:r, :r] == W).all() and intmat.is_unimodular(full)
    return full


def is_Mstar(W, g: int) -> bool:
    return mstar_completion(W, g) is not None


# symplectic completion ------------------------------------------------------------


def complete_pair(pair: SymPair) -> np.ndarray:
    """A symplectic matrix with bottom block row (C | D)."""
    P = pair.block
    g = pair.genus
    N = intmat.complete_rows(P)  # P occupies the first rows
    X = N[g:]
    J = np.zeros((2 * g, 2 * g), dtype=object) * 0
    J[:g, g:] = -intmat.identity(g)
    J[g:, :g] = intmat.identity(g)
    # X J P^t = -(A D^t - B C^t); normalise it to -I
    K = X.dot(J).dot(P.T)
    X = intmat.int_inverse(-K).dot(X)
    A = X.dot(J).dot(X.T)  # antisymmetric; adding S P shifts it by S - S^t
    S = intmat.zeros(g)
    for i in range(g):
        for j in range(i + 1, g):
            S[i, j] = -A[i, j]
    X = X + S.dot(P)
    M = np.concatenate([X, P], axis=0)
    assert is_symplectic(M)
    return M


# genus-2 Eisenstein series -------------------------------------------------------


@dataclass(frozen=True)
class Genus2Config:
    H1: int = 60  # genus-1 coset height inside the rank-one stratum
    Hw: int = 4  # window for the primitive vectors w
    Hc: int = 3  # bound for the Hermite entries of C in the rank-two stratum
    HB: int = 4  # window for the translations B


class Genus2Eisenstein:
    """Pointwise E^k_{2,L} by summing the three rank strata.

    rank 0: e_0.
    rank 1: sum over w of the genus-1 series at w^t tau w (minus its
        identity coset), pushed to C[D^2] along delta -> (w_1 delta, w_2 delta).
    rank 2: classes (C, C P0) with C in Hermite form and P0 mod Sym_2(Z),
        each summed over translations B with the Weil phases of T_B.

    Needs an even signature and integral weight, so the automorphy factor
    is det(C tau + D)^{-k} and rho factors through Sp_4(Z).
    """

    def __init__(self, lattice: EvenLattice, k: int, cfg: Genus2Config = Genus2Config()):
        if lattice.signature % 2 or Fraction(k).denominator != 1:
            raise ValueError("the genus-2 evaluator needs even signature and integral weight")
        if k <= 3:
            raise ValueError("the genus-2 series converges for k > 3")
        self.lattice, self.k, self.cfg = lattice, int(k), cfg
        self.D = discriminant_group(lattice)
        n = self.D.order
        self.dim = n * n
        self.ws = primitive_vectors(2, cfg.Hw)
        self.w_index = [np.array([self.D.tuple_index((self.D.mul(w[0], d), self.D.mul(w[1], d))) for d in range(n)])
                        for w in self.ws]
        self.rep2 = WeilRep(lattice, 2, backend="numeric") if n > 1 else None
        self.classes = self._rank_two_classes()
        Bs = np.array(list(itertools.product(range(-cfg.HB, cfg.HB + 1), repeat=3)), dtype=float)
        self.B = Bs
        q1 = np.array([float(self.D.q(a)) for (a, b) in self._tuples()])
        q2 = np.array([float(self.D.q(b)) for (a, b) in self._tuples()])
        b12 = np.array([float(self.D.b(a, b)) for (a, b) in self._tuples()])
        tr = Bs[:, [0]] * q1[None, :] + Bs[:, [1]] * b12[None, :] + Bs[:, [2]] * q2[None, :]
        self.phase = np.exp(-2j * np.pi * tr)  # rho(T_B)^{-1} on e_beta
        self._boundary = np.max(np.abs(Bs), axis=1) == cfg.HB

    def _tuples(self):
        n = self.D.order
        return [(a, b) for a in range(n) for b in range(n)]

    def _rank_two_classes(self):
        out = []
        for C in hnf_matrices(self.cfg.Hc):
            n = int(intmat.det(C))
            for x11, x12, x22 in itertools.product(range(n), repeat=3):
                P0 = intmat.as_frac_matrix([[Fraction(x11, n), Fraction(x12, n)], [Fraction(x12, n), Fraction(x22, n)]])
                Dm = C.dot(P0)
                if any(Fraction(v).denominator != 1 for v in Dm.flat):
                    continue
                Dm = intmat.as_int_matrix(Dm)
                pair = SymPair.make(C, Dm)
                if intmat.minors_gcd(pair.block) != 1:
                    continue
                if self.rep2 is None:
                    u = np.ones(1, dtype=complex)
                else:
                    M = complete_pair(pair)
                    rho = self.rep2.rho_of(MpElement.make(M))
                    u = np.conj(rho[0, :])
                out.append((n, np.array(P0.tolist(), dtype=float), u, max(int(v) for v in C.flat)))
        return out

    def evaluate(self, taus, seriescfg: SeriesConfig | None = None):
        """Values at an array of 2 x 2 points, shape (N, |D|^2), and error pieces."""
        taus = np.asarray(taus, dtype=complex).reshape(-1, 2, 2)
        N = len(taus)
        k = self.k
        scfg = seriescfg or SeriesConfig(H=self.cfg.H1)
        vals = np.zeros((N, self.dim), dtype=complex)
        vals[:, 0] = 1.0
        parts = {"rank0": vals.copy()}
        # rank one
        W = np.array(self.ws, dtype=float)
        z = np.einsum("wi,nij,wj->nw", W, taus, W)
        e1, t1 = eisenstein_genus1(self.lattice, k, scfg, z.reshape(-1))
        e1 = e1.reshape(N, len(self.ws), -1)
        e1[:, :, 0] -= 1.0
        rank1 = np.zeros_like(vals)
        outer = np.zeros_like(vals)
        for j, (w, idx) in enumerate(zip(self.ws, self.w_index)):
            np.add.at(rank1, (slice(None), idx), e1[:, j, :])
            if max(abs(x) for x in w) == self.cfg.Hw:
                np.add.at(outer, (slice(None), idx), e1[:, j, :])
        parts["rank1"], parts["rank1_outer_shell"] = rank1, outer
        # rank two
        rank2 = np.zeros_like(vals)
        last_shell = np.zeros_like(vals)
        bshell = np.zeros_like(vals)
        for n, P0, u, hmax in self.classes:
            Z = taus[:, None, :, :] + P0[None, None, :, :]
            a = Z[:, :, 0, 0] + self.B[None, :, 0]
            b = Z[:, :, 0, 1] + self.B[None, :, 1]
            c = Z[:, :, 1, 1] + self.B[None, :, 2]
            det = a * c - b * b
            term = (float(n) ** (-k)) * det ** (-k)
            contrib = term @ (self.phase * u[None, :])
            rank2 += contrib
            bshell += (term * self._boundary[None, :]) @ (self.phase * u[None, :])
            if hmax == self.cfg.Hc:
                last_shell += contrib
        parts["rank2"], parts["rank2_last_shell"], parts["rank2_B_shell"] = rank2, last_shell, bshell
        vals = vals + rank1 + rank2
        parts["genus1_tail"] = t1
        return vals, parts


def fj_degeneration_check(lattice: EvenLattice, k: int, tau4_points, cfg: Genus2Config = Genus2Config(),
                          y1: float = 1.0, Q1: int = 16, tol: float = 0.05) -> dict:
    """Zero-index Fourier-Jacobi coefficient of E^k_{2,L} at tau_2 = 0 against E^k_{1,L}.

    The coefficient is the mean over a uniform x_1 grid of
    E(diag(x_1 + i y_1, tau_4)); component (0, delta) must match
    E^k_{1,L}(tau_4)_delta and components (alpha, delta) with alpha != 0
    isotropic must vanish.  Components with q(alpha) != 0 carry no index-0
    coefficient and are skipped.
    """
    ev = Genus2Eisenstein(lattice, k, cfg)
    D = ev.D
    n = D.order
    scfg = SeriesConfig(H=cfg.H1)
    xs = np.arange(Q1) / Q1
    results, ok = [], True
    for t4 in tau4_points:
        t4 = complex(t4)
        taus = np.zeros((Q1, 2, 2), dtype=complex)
        taus[:, 0, 0] = xs + 1j * y1
        taus[:, 1, 1] = t4
        vals, parts = ev.evaluate(taus, scfg)
        phi0 = vals.mean(axis=0).reshape(n, n)
        target, tail4 = eisenstein_genus1(lattice, k, scfg, [t4])
        target = target[0]
        budget = (
            tail4
            + parts["genus1_tail"] * len(ev.ws)
            + float(np.abs(parts["rank1_outer_shell"].mean(axis=0)).max())
            + float(np.abs(parts["rank2_last_shell"].mean(axis=0)).max())
            + float(np.abs(parts["rank2_B_shell"].mean(axis=0)).max())
        )
        diff_main = float(np.max(np.abs(phi0[0] - target)))
        # E_k may vanish at tau_4 (E_6(i) = 0); the constant term 1 sets the scale then
        scale = max(float(np.max(np.abs(target))), 1.0)
        iso = [a for a in range(1, n) if D.q(a) == 0]
        diff_iso = float(max((np.max(np.abs(phi0[a])) for a in iso), default=0.0))
        rel = diff_main / scale
        passed = rel < tol and diff_iso <= max(tol * scale, budget)
        ok &= passed
        results.append({
            "tau4": [t4.real, t4.imag],
            "phi0": [[v.real, v.imag] for v in phi0[0]],
            "genus1": [[v.real, v.imag] for v in target],
            "abs_diff": diff_main,
            "rel_diff": rel,
            "isotropic_components_max": diff_iso,
            "error_budget": budget,
            "within_budget": diff_main <= budget and diff_iso <= budget,
            "ok": bool(passed),
        })
    return {"k": k, "config": cfg.__dict__, "y1": y1, "Q1": Q1, "points": results, "ok": bool(ok)}


def fj_zero_coefficient_table(f: TruncatedExpansion) -> TruncatedExpansion:
    """Genus-1 table of the index-0 Fourier-Jacobi coefficient at tau_2 = 0.

    Sums the coefficients c((alpha1, alpha2), (0, T2; T2, T4)) over T2 for
    alpha1 = 0 (positive semidefiniteness forces T2 = 0).
    """
    if f.genus != 2:
        raise GenusUnsupported("needs a genus-2 table")
    out = {}
    for (a, T), v in f.table.items():
        if a[0] != 0 or T[0][0] != 0:
            continue
        key = ((a[1],), ((T[1][1],),))
        out[key] = out[key] + v if key in out else v
    return f._like(out, genus=1)
