"""Numeric genus-1 Eisenstein and Poincaré series, Petersson products.

Coset representatives of the translation cover in Mp_2(Z) are built from
the continued-fraction recursion

    gamma(c, d) = gamma(-d', c) * S * T^n,   n = round(d / c), d' = d - n c,

which ends at (0, +-1).  Along the way we track the matrix, the value of
the square root at i, and rho(gamma)^{-1} applied to a few seed basis
vectors, so every coset costs O(|D|^2) once and evaluation is a single
matrix product over all points.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import oracles
from .expansion import TruncatedExpansion, siegel_phi, weight_parity_ok
from .lattice import EvenLattice, discriminant_group
from .weilrep import WeilRep


class NonconvergentWeight(ValueError):
    pass


class ParityMismatch(ValueError):
    pass


class NonPositiveIndex(ValueError):
    pass


class WeightTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class SeriesConfig:
    H: int = 60
    Q: int = 64
    Y: float = 6.0
    y: float = 2.0
    precision: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        if self.H < 1 or self.Q < 8 or not self.Y > 1:
            raise ValueError("need H >= 1, Q >= 8 and Y > 1")

    def to_dict(self):
        return asdict(self)


# coset engine ----------------------------------------------------------------


@dataclass
class _Coset:
    a: int
    b: int
    c: int
    d: int
    phi_i: complex  # value of the square root at tau = i
    vecs: np.ndarray  # rho(gamma)^{-1} e_s for the seeds s, shape (|D|, n_seeds)

    @property
    def sign(self) -> int:
        """phi(tau) = sign * principal sqrt(c tau + d)."""
        r = cmath.sqrt(complex(self.d, self.c))
        return 1 if abs(self.phi_i - r) < abs(self.phi_i + r) else -1


class Genus1Cosets:
    """Coset data for Gamma_infinity-tilde \\ Mp_2(Z) up to height H.

    The enumerated cosets are (0, 1) and the coprime (c, d) with
    0 < c <= H and |d| <= H.
    """

    def __init__(self, lattice: EvenLattice, H: int, seeds):
        self.rep = WeilRep(lattice, 1, backend="numeric")
        self.D = self.rep.D
        self.H = H
        self.seeds = list(seeds)
        n = self.D.order
        self._s_inv = np.conj(self.rep.rho_S()).T
        self._q = np.array([float(self.D.q(a)) for a in range(n)])
        start = np.zeros((n, len(self.seeds)), dtype=complex)
        for j, s in enumerate(self.seeds):
            start[s, j] = 1.0
        self._memo = {(0, 1): _Coset(1, 0, 0, 1, 1 + 0j, start)}
        # (0, -1) is S^2 = (-I, sqrt(i)^2)
        s2 = self._s_inv @ (self._s_inv @ start)
        self._memo[(0, -1)] = _Coset(-1, 0, 0, -1, 1j, s2)
        pairs = [(0, 1)] + [(c, d) for c in range(1, H + 1) for d in range(-H, H + 1) if math.gcd(c, d) == 1]
        self.cosets = [self._build(c, d) for c, d in pairs]
        self.pairs = pairs
        self.c = np.array([g.c for g in self.cosets], dtype=float)
        self.d = np.array([g.d for g in self.cosets], dtype=float)
        self.a = np.array([g.a for g in self.cosets], dtype=float)
        self.b = np.array([g.b for g in self.cosets], dtype=float)

    def _build(self, c, d) -> _Coset:
        stack = []
        while (c, d) not in self._memo:
            n = _round_half(Fraction(d, c))
            stack.append((c, d, n))
            c, d = -(d - n * c), c
        prev = self._memo[(c, d)]
        for c, d, n in reversed(stack):
            prev = self._extend(prev, n)
            self._memo[(c, d)] = prev
        return prev

    def _extend(self, X: _Coset, n: int) -> _Coset:
        """X * S * T^n."""
        a, b, c, d = X.b, -X.a + n * X.b, X.d, -X.c + n * X.d
        # phi_{X S T^n}(i) = phi_X(-1/(i+n)) * sqrt(i+n)
        w = -1 / complex(n, 1)
        phi = X.sign * cmath.sqrt(X.c * w + X.d) * cmath.sqrt(complex(n, 1))
        v = self._s_inv @ X.vecs
        v = np.exp(-2j * np.pi * n * self._q)[:, None] * v
        return _Coset(a, b, c, d, phi, v)

    def weighted(self, k: Fraction) -> np.ndarray:
        """sign^{-2k} rho^{-1} e_seed, stacked to shape (K, |D|, n_seeds)."""
        two_k = int(2 * k)
        signs = np.array([g.sign ** two_k for g in self.cosets], dtype=float)
        return signs[:, None, None] * np.stack([g.vecs for g in self.cosets])


def _round_half(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def _lambda_min(tau) -> float:
    """Smallest eigenvalue of the form |c tau + d|^2 over the given points."""
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    x, y = tau.real, tau.imag
    t = 1 + x * x + y * y
    lam = (t - np.sqrt(np.maximum(t * t - 4 * y * y, 0))) / 2
    return float(lam.min())


def tail_bound(k, H: int, tau) -> float:
    """Bound for the omitted cosets: pi lambda^{-k/2} H^{2-k} / (k-2)."""
    k = float(k)
    return math.pi * _lambda_min(tau) ** (-k / 2) * H ** (2 - k) / (k - 2)


def _check_weight(lattice, k):
    k = Fraction(k)
    if k <= 2:
        raise NonconvergentWeight("coset sums need k > 2")
    if not weight_parity_ok(k, lattice.signature):
        raise ParityMismatch(f"2k = {2 * k} is not congruent to sig = {lattice.signature} mod 4")
    return k


def _chunked(fn, tau, threads: int, chunk: int = 256):
    """Evaluate fn on blocks of points; block results are placed in order."""
    tau = np.asarray(tau, dtype=complex).reshape(-1)
    blocks = [tau[i : i + chunk] for i in range(0, len(tau), chunk)] or [tau]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(fn, blocks))
    else:
        parts = [fn(b) for b in blocks]
    return np.concatenate(parts, axis=0)


_COSET_CACHE: dict = {}


def _cosets(lattice, H, seeds) -> Genus1Cosets:
    key = (lattice.gram, H, tuple(seeds))
    if key not in _COSET_CACHE:
        _COSET_CACHE[key] = Genus1Cosets(lattice, H, seeds)
    return _COSET_CACHE[key]


def _automorphy(cos: Genus1Cosets, tau, k):
    """(c tau + d)^{-k} with the principal branch, shape (N, K)."""
    z = tau[:, None] * cos.c[None, :] + cos.d[None, :]
    return np.exp(-float(k) * np.log(z))


# Eisenstein --------------------------------------------------------------------


def eisenstein_genus1(lattice: EvenLattice, k, cfg: SeriesConfig, tau):
    """E^k_{1,L}(tau) for an array of points; returns (values (N, |D|), tail bound)."""
    k = _check_weight(lattice, k)
    cos = _cosets(lattice, cfg.H, [0])
    W = cos.weighted(k)[:, :, 0]
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))

    def block(t):
        return _automorphy(cos, t, k) @ W

    vals = _chunked(block, tau, cfg.threads)
    return vals, tail_bound(k, cfg.H, tau)


def eisenstein_coeffs_genus1(lattice: EvenLattice, k, cfg: SeriesConfig, m_max: int):
    """Fourier coefficients c_m(alpha) for m <= m_max by x-grid quadrature.

    Index m > 0 is read at height y_m = min(y, k/(2 pi m)), which minimises
    the product of the tail bound (about y^{-k}) and e^{2 pi m y}.
    Returns (TruncatedExpansion, error estimates by key).
    """
    k = _check_weight(lattice, k)
    D = discriminant_group(lattice)
    Q = cfg.Q
    x = -0.5 + np.arange(Q) / Q
    heights = {}
    for a in range(D.order):
        q = D.q(a)
        m = q
        while m <= m_max:
            y = cfg.y if m == 0 else min(cfg.y, float(k) / (2 * math.pi * float(m)))
            heights.setdefault(y, []).append((a, m))
            m += 1
    table, errors = {}, {}
    for y, keys in sorted(heights.items()):
        vals, tail = eisenstein_genus1(lattice, k, cfg, x + 1j * y)
        for a, m in keys:
            mf = float(m)
            c = np.mean(vals[:, a] * np.exp(-2j * np.pi * mf * x)) * math.exp(2 * math.pi * mf * y)
            alias = _aliasing_estimate(k, mf, Q, y)
            table[((a,), ((m,),))] = complex(c)
            errors[((a,), ((m,),))] = tail * math.exp(2 * math.pi * mf * y) + alias
    f = TruncatedExpansion(lattice, 1, k, Fraction(m_max), table, validate=False)
    return f, errors


def _aliasing_estimate(k, m: float, Q: int, y: float) -> float:
    """Contribution of indices m + jQ, j >= 1, assuming |c_n| <= 4 (n + 1)^{k}."""
    total = 0.0
    for j in range(1, 50):
        n = m + j * Q
        term = 4 * (n + 1) ** float(k) * math.exp(-2 * math.pi * (n - m) * y)
        total += term
        if term < 1e-300:
            break
    return total


def siegel_phi_on_eisenstein_check(lattice: EvenLattice, k, cfg: SeriesConfig, m_max: int = 2):
    """Apply the Siegel operator to the numeric genus-1 table.

    Phi_0 must give the constant 1; Phi_beta with beta nonzero must give 0
    (by the vanishing of c_0 at beta when beta is isotropic, and by the
    structural rule when q(beta) != 0).
    """
    f, errors = eisenstein_coeffs_genus1(lattice, k, cfg, m_max)
    D = discriminant_group(lattice)
    report = {"beta": [], "ok": True}
    for beta in range(D.order):
        phi = siegel_phi(f, (beta,))
        value = complex(phi.table.get(((), ()), 0j))
        err = errors.get(((beta,), ((Fraction(0),),)), 0.0)
        target = 1.0 if beta == 0 else 0.0
        ok = abs(value - target) <= 2 * err + 1e-12
        structural = bool(D.q(beta) != 0)
        report["beta"].append(
            {"beta": beta, "value": [value.real, value.imag], "error_estimate": err, "structural_zero": structural, "ok": ok}
        )
        report["ok"] &= ok
    return report


# Poincaré ----------------------------------------------------------------------


def poincare_genus1(lattice: EvenLattice, k, alpha: int, m, cfg: SeriesConfig, tau):
    """P^k_{1,alpha,m}(tau): half the sum over all cosets of (c, d) and (-c, -d).

    The (-c, -d) term equals the (c, d) term with alpha replaced by -alpha,
    so we sum over c > 0 and (0, 1) against e_alpha + e_{-alpha}.
    """
    k = _check_weight(lattice, k)
    m = Fraction(m)
    if m <= 0:
        raise NonPositiveIndex("Poincaré index must be positive")
    D = discriminant_group(lattice)
    if (m - D.q(alpha)).denominator != 1:
        raise ValueError("m must lie in q(alpha) + Z")
    neg = D.neg(alpha)
    cos = _cosets(lattice, cfg.H, sorted({alpha, neg}))
    W = cos.weighted(k)
    W = 0.5 * (W[:, :, 0] + W[:, :, -1])
    tau = np.atleast_1d(np.asarray(tau, dtype=complex))
    mf = float(m)

    def block(t):
        z = t[:, None] * cos.c[None, :] + cos.d[None, :]
        gt = (t[:, None] * cos.a[None, :] + cos.b[None, :]) / z
        return (np.exp(-float(k) * np.log(z) + 2j * np.pi * mf * gt)) @ W

    vals = _chunked(block, tau, cfg.threads)
    return vals, tail_bound(k, cfg.H, tau)


# Petersson products --------------------------------------------------------------


def fundamental_domain_rule(n: int, Y: float):
    """Nodes and weights for dx dy over {|x| <= 1/2, |tau| >= 1, y <= Y}.

    The curved part below y = 1 uses Gauss-Legendre in both variables; the
    rectangle above uses the periodic trapezoid rule in x (the integrands
    are 1-periodic there) and Gauss-Legendre panels of unit length in y.
    """
    gx, gw = np.polynomial.legendre.leggauss(n)
    xs, ws = 0.5 * gx, 0.5 * gw
    pts, wts = [], []
    for x, wx in zip(xs, ws):
        lo = math.sqrt(1 - x * x)
        half = (1 - lo) / 2
        pts.append(x + 1j * (lo + half * (gx + 1)))
        wts.append(wx * half * gw)
    tx = -0.5 + np.arange(2 * n) / (2 * n)
    edges = np.linspace(1.0, Y, max(2, int(math.ceil(Y - 1))) + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2
        ys = lo + half * (gx + 1)
        X, Yg = np.meshgrid(tx, ys, indexing="ij")
        pts.append((X + 1j * Yg).ravel())
        wts.append(np.outer(np.full(2 * n, 1.0 / (2 * n)), half * gw).ravel())
    return np.concatenate(pts), np.concatenate(wts)


def petersson(f_vals, g_vals, tau, weights, k) -> complex:
    """int_F <f, g> y^k dmu from values on a quadrature rule."""
    f_vals = np.asarray(f_vals).reshape(len(tau), -1)
    g_vals = np.asarray(g_vals).reshape(len(tau), -1)
    y = tau.imag
    dens = np.sum(f_vals * np.conj(g_vals), axis=1) * y ** (float(k) - 2)
    return complex(np.sum(dens * weights))


def petersson_quadrature(f, g, k, n: int, Y: float) -> dict:
    """Petersson product of two callables at two resolutions.

    ``f`` and ``g`` map an array of points to values of shape (N,) or (N, |D|).
    The error estimate is the change from n/2 to n nodes plus a y-tail guess.
    """
    out = []
    for m in (max(4, n // 2), n):
        tau, w = fundamental_domain_rule(m, Y)
        out.append(petersson(f(tau), g(tau), tau, w, k))
    # tail beyond Y from the decay between two heights of the row averages
    tx = -0.5 + np.arange(2 * n) / (2 * n)
    rows = []
    for yy in (Y - 1, Y):
        t = tx + 1j * yy
        v = np.sum(np.asarray(f(t)).reshape(len(t), -1) * np.conj(np.asarray(g(t)).reshape(len(t), -1)), axis=1)
        rows.append(abs(np.mean(v)) * yy ** (float(k) - 2))
    rate = math.log(rows[0] / rows[1]) if rows[1] > 0 and rows[0] > rows[1] else 0.0
    tail = rows[1] / rate if rate > 0 else rows[1] * Y
    return {"value": out[1], "coarse": out[0], "error_estimate": abs(out[1] - out[0]) + tail}


# Petersson constant --------------------------------------------------------------


@dataclass(frozen=True)
class PeterssonConstant:
    k: Fraction
    g: int
    pi_power: Fraction
    four_pi_power: Fraction
    gamma_args: tuple = field(default_factory=tuple)

    @property
    def symbolic(self):
        expr = sympy.pi ** sympy.Rational(self.pi_power.numerator, self.pi_power.denominator)
        expr *= (4 * sympy.pi) ** sympy.Rational(self.four_pi_power.numerator, self.four_pi_power.denominator)
        for a in self.gamma_args:
            expr *= sympy.gamma(sympy.Rational(a.numerator, a.denominator))
        return expr

    @property
    def value(self) -> float:
        logv = float(self.pi_power) * math.log(math.pi) + float(self.four_pi_power) * math.log(4 * math.pi)
        logv += sum(math.lgamma(float(a)) for a in self.gamma_args)
        return math.exp(logv)

    def to_dict(self):
        return {
            "k": str(self.k),
            "g": self.g,
            "pi_power": str(self.pi_power),
            "four_pi_power": str(self.four_pi_power),
            "gamma_args": [str(a) for a in self.gamma_args],
            "value": float(f"{self.value:.17g}"),
        }


def petersson_constant(k, g: int) -> PeterssonConstant:
    """c_{k,g} = pi^{g(g-1)/4} (4 pi)^{g(g+1)/2 - gk} prod_l Gamma(k - (g+l)/2)."""
    k = Fraction(k)
    if g < 1:
        raise ValueError("genus must be positive")
    if k <= 2 * g:
        raise WeightTooSmall(f"need k > 2g, got k={k}, g={g}")
    args = tuple(k - Fraction(g + l, 2) for l in range(1, g + 1))
    return PeterssonConstant(k, g, Fraction(g * (g - 1), 4), Fraction(g * (g + 1), 2) - g * k, args)


def cone_integral_check(k, g: int, T) -> dict:
    """Compare int_{y > 0} det y^{k-g-1} exp(-4 pi tr Ty) dy with c_{k,g} det T^{(g+1)/2-k}."""
    from scipy import integrate

    k = Fraction(k)
    const = petersson_constant(k, g)
    T = np.asarray(T, dtype=float).reshape(g, g)
    detT = float(np.linalg.det(T))
    expected = const.value * detT ** (float(Fraction(g + 1, 2) - k))
    if g == 1:
        y, t = sympy.symbols("y t", positive=True)
        kk = sympy.Rational(k.numerator, k.denominator)
        lhs = sympy.integrate(y ** (kk - 2) * sympy.exp(-4 * sympy.pi * t * y), (y, 0, sympy.oo))
        rhs = const.symbolic * t ** (1 - kk)
        exact = sympy.simplify(lhs - rhs) == 0
        numeric = float(lhs.subs(t, T[0, 0]))
        return {"g": 1, "k": str(k), "exact_match": bool(exact), "numeric": numeric, "expected": expected,
                "relative_error": abs(numeric / expected - 1)}
    if g != 2:
        raise ValueError("cone integral check supports g <= 2")
    # y = z/(4 pi); z = (a, b; b, c) with b = sqrt(ac) u, |u| < 1
    p = float(k) - 3
    t11, t12, t22 = T[0, 0], T[0, 1], T[1, 1]

    def integrand(u, c, a):
        s = math.sqrt(a * c)
        return (a * c * (1 - u * u)) ** p * s * math.exp(-(t11 * a + 2 * t12 * s * u + t22 * c))

    opts = {"epsabs": 0.0, "epsrel": 1e-9, "limit": 200}
    val, err = integrate.nquad(integrand, [(-1, 1), (0, np.inf), (0, np.inf)], opts=[opts, opts, opts])
    scale = (4 * math.pi) ** (-2 * float(k) + 3)
    numeric = val * scale
    return {"g": 2, "k": str(k), "numeric": numeric, "quad_error": err * scale, "expected": expected,
            "relative_error": abs(numeric / expected - 1)}


# coefficient pairing and unfolding -------------------------------------------------


def poincare_coeff_pairing(lattice: EvenLattice, f, k, alpha: int, m, cfg: SeriesConfig, c_m: complex, n: int = 24):
    """<f, P_{alpha,m}> by quadrature against c_{k,1} m^{1-k} c_m(f_alpha)."""
    P = lambda t: poincare_genus1(lattice, k, alpha, m, cfg, t)[0]
    res = petersson_quadrature(f, P, k, n, cfg.Y)
    const = petersson_constant(k, 1).value
    rhs = const * float(m) ** (1 - float(k)) * c_m
    res.update({"expected": rhs, "ratio": res["value"] / rhs if rhs else None, "constant": const})
    return res


def holomorphic_normalisation(k: int, m: int) -> float:
    """c(0) = (4 pi m)^{k-1} / (k-2)!."""
    return (4 * math.pi * m) ** (k - 1) / math.factorial(k - 2)


def unfolding_discrepancy(lattice: EvenLattice, k: int, m: int, cfg: SeriesConfig, n: int = 24) -> dict:
    """(a) <E_k, P_m(., 0)> by quadrature versus (b) the unfolded closed form at s = 0.

    Also runs the same comparison with the level-one cusp form of weight 12
    in place of E_k when k = 12.
    """
    if m <= 0:
        raise NonPositiveIndex("index m must be positive")
    if discriminant_group(lattice).order != 1:
        raise ValueError("the unfolding demo needs a lattice with trivial discriminant group")
    c0 = holomorphic_normalisation(k, m)
    P = lambda t: poincare_genus1(lattice, k, 0, m, cfg, t)[0]
    E = lambda t: eisenstein_genus1(lattice, k, cfg, t)[0]
    pe = petersson_quadrature(E, P, k, n, cfg.Y)
    s = sympy.Symbol("s")
    cm = oracles.eisenstein_q_coeffs(k, m + 1)[m]
    c_s = sympy.Rational(1)  # only c(0) is known, so c(s) is frozen at s = 0
    closed = c_s * (4 * sympy.pi * m) ** (k - 1) / sympy.factorial(k - 2) * sympy.gamma(k + s - 1) / (4 * sympy.pi * m) ** (k + s - 1)
    b = closed.subs(s, 0) * sympy.Rational(cm.numerator, cm.denominator)
    out = {
        "a": complex(c0 * pe["value"]),
        "a_error_estimate": c0 * pe["error_estimate"],
        "b": float(b),
        "b_exact": str(sympy.nsimplify(b)),
        "c0": c0,
        "config": cfg.to_dict(),
    }
    if k == 12:
        cusp = oracles.delta_function()
        pd = petersson_quadrature(cusp, P, k, n, cfg.Y)
        out["cusp_a"] = complex(c0 * pd["value"])
        out["cusp_b"] = float(oracles.delta_q_coeffs(m + 1)[m])
        out["cusp_error_estimate"] = c0 * pd["error_estimate"]
    return out


# spot checks ------------------------------------------------------------------------


def modularity_defect(lattice: EvenLattice, k, cfg: SeriesConfig, gamma, tau) -> dict:
    """|E(gamma tau) - phi(tau)^{2k} rho(gamma) E(tau)| against the tail bounds."""
    k = Fraction(k)
    rep = WeilRep(lattice, 1, backend="numeric")
    tau = complex(tau)
    gt = complex(gamma.act(np.array([[tau]]))[0, 0])
    lhs, t1 = eisenstein_genus1(lattice, k, cfg, [gt])
    rhs, t0 = eisenstein_genus1(lattice, k, cfg, [tau])
    phi = gamma.phi(np.array([[tau]]))
    pred = phi ** int(2 * k) * (rep.rho_of(gamma) @ rhs[0])
    return {"defect": float(np.max(np.abs(lhs[0] - pred))), "tail": t1 + abs(phi) ** float(2 * k) * t0}


def decay_profile(f, k, ys) -> np.ndarray:
    """y^{k/2} |f(iy)| on the given heights."""
    ys = np.asarray(ys, dtype=float)
    return ys ** (float(k) / 2) * np.abs(np.asarray(f(1j * ys)).reshape(len(ys), -1)).max(axis=1)
