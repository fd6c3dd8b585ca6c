"""Command-line front end: ``python -m vvsiegel <group> <command> ...``."""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

DEFAULT_SEED = 20240611


# deterministic JSON ----------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj) -> str:
    """Compact JSON with sorted keys and floats at 17 significant digits."""
    out = []
    _emit(obj, out)
    return "".join(out)


def _emit(obj, out):
    from .cyclotomic import CycNumber

    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(bool(obj) if obj is not None else None))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _emit([complex(obj).real, complex(obj).imag], out)
    elif isinstance(obj, Fraction):
        out.append(json.dumps(f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else str(obj.numerator)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, CycNumber):
        _emit(obj.to_json(), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _emit(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(list(obj)):
            if i:
                out.append(",")
            _emit(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


# configuration -----------------------------------------------------------------------


@dataclass
class SessionConfig:
    lattice: object = None
    genus: int = 1
    weight: Fraction | None = None
    backend: str = "exact"
    series: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        from .expansion import weight_parity_ok
        from .series import ParityMismatch

        if self.weight is not None and self.lattice is not None:
            if not weight_parity_ok(self.weight, self.lattice.signature):
                raise ParityMismatch(f"2k = {2 * self.weight} is not congruent to sig = {self.lattice.signature} mod 4")


def _json_arg(text):
    """Inline JSON or a path to a JSON file."""
    if text is None:
        return None
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return json.loads(text)


def _lattice(args):
    from .lattice import build_lattice, lattice_from_json

    if getattr(args, "lattice", None):
        return lattice_from_json(_json_arg(args.lattice))
    if getattr(args, "gram", None):
        return build_lattice(_json_arg(args.gram))
    from .lattice import e8, hyperbolic_plane, orthogonal_sum

    return orthogonal_sum(hyperbolic_plane(), hyperbolic_plane(), e8())


def _series_cfg(args):
    from .series import SeriesConfig

    return SeriesConfig(H=args.H, Q=args.Q, Y=args.Y, threads=args.threads)


# commands --------------------------------------------------------------------------------


def cmd_lattice_info(args):
    from .lattice import discriminant_group

    L = _lattice(args)
    D = discriminant_group(L)
    return {
        "gram": [list(r) for r in L.gram],
        "rank": L.rank,
        "signature": [L.sig_pos, L.sig_neg],
        "det": L.det,
        "order": D.order,
        "level": D.level,
        "generator_orders": list(D.generator_orders),
        "q": [D.q(a) for a in range(D.order)],
    }


def cmd_weilrep_matrix(args):
    from .metaplectic import word_from_json
    from .weilrep import WeilRep

    L = _lattice(args)
    word, flips = word_from_json(_json_arg(args.word))
    rep = WeilRep(L, args.genus, backend="numeric" if args.float else "exact")
    X = rep.rho_word(word, flips)
    if args.float:
        return {"backend": "numeric", "matrix": [[[v.real, v.imag] for v in row] for row in np.asarray(X)]}
    return {"backend": "exact", "matrix": X.to_json()}


def _load_table(args):
    from .expansion import TruncatedExpansion

    data = _json_arg(args.table)
    return TruncatedExpansion.from_json(json.dumps(data))


def cmd_expansion_phi(args):
    from .expansion import siegel_phi

    f = _load_table(args)
    return json.loads(siegel_phi(f, _json_arg(args.beta)).to_json())


def cmd_expansion_symmetry(args):
    from .expansion import check_coeff_symmetry

    f = _load_table(args)
    rep = check_coeff_symmetry(f, _json_arg(args.A))
    out = {kind: [{"alpha": list(a), "T": [[str(x) for x in r] for r in T], "lhs": lhs, "rhs": rhs}
                  for (a, T, lhs, rhs) in v] for kind, v in rep.items()}
    out["ok"] = not any(rep.values())
    return out


def cmd_expansion_cusp(args):
    from .expansion import is_cusp

    ok, bad = is_cusp(_load_table(args), args.tol)
    return {"cusp": ok, "violations": [[list(a), [[str(x) for x in r] for r in T]] for a, T in bad]}


def cmd_expansion_reduce(args):
    from .expansion import gl_reduce

    red, A = gl_reduce([[Fraction(x) for x in r] for r in _json_arg(args.T)])
    return {"T": [[str(x) for x in r] for r in red], "A": [[int(x) for x in r] for r in A.tolist()]}


def cmd_series_eis1(args):
    from .series import eisenstein_coeffs_genus1

    L = _lattice(args)
    cfg = _series_cfg(args)
    k = Fraction(args.k)
    SessionConfig(lattice=L, weight=k)
    f, err = eisenstein_coeffs_genus1(L, k, cfg, args.mmax)
    coeffs = [{"alpha": list(a), "m": T[0][0], "value": f.table[(a, T)], "error_estimate": err[(a, T)]}
              for (a, T) in f.keys()]
    return {"value": coeffs, "error_estimate": max(err.values()), "config": cfg.to_dict(), "weight": k}


def cmd_series_pet_const(args):
    from .series import cone_integral_check, petersson_constant

    const = petersson_constant(Fraction(args.k), args.g)
    out = {"value": const.to_dict(), "symbolic": str(const.symbolic)}
    if args.check:
        T = _json_arg(args.check)
        rep = cone_integral_check(Fraction(args.k), args.g, T)
        out["check"] = rep
        out["error_estimate"] = rep.get("relative_error")
    return out


def cmd_series_unfold_demo(args):
    from .series import unfolding_discrepancy

    L = _lattice(args)
    rep = unfolding_discrepancy(L, args.k, args.m, _series_cfg(args), n=args.nodes)
    return {"value": rep, "error_estimate": rep["a_error_estimate"], "config": rep["config"]}


def cmd_series_poincare(args):
    from . import oracles
    from .series import poincare_coeff_pairing

    L = _lattice(args)
    f = oracles.delta_function()
    rep = poincare_coeff_pairing(L, f, 12, 0, args.m, _series_cfg(args), float(oracles.delta_q_coeffs(args.m + 1)[args.m]),
                                 n=args.nodes)
    return {"value": rep, "error_estimate": rep["error_estimate"], "config": _series_cfg(args).to_dict()}


def cmd_doubling_enum(args):
    from .doubling import enumerate_ST, stratify

    items = list(enumerate_ST(args.genus, args.height))
    if args.csv:
        lines = ["rank,C,D"]
        for p, r in items:
            lines.append(f"{r},\"{json.dumps([list(x) for x in p.C])}\",\"{json.dumps([list(x) for x in p.D])}\"")
        return "\n".join(lines)
    out = {"count": len(items)}
    if args.stratify:
        out["strata"] = {str(r): len(v) for r, v in sorted(stratify(items).items())}
    return out


def cmd_doubling_setofrep(args):
    from .doubling import setofrep_check

    return setofrep_check(2, args.nu, args.height)


def cmd_doubling_fj(args):
    from .doubling import Genus2Config, fj_degeneration_check

    L = _lattice(args)
    cfg = Genus2Config(H1=args.H, Hw=args.Hw, Hc=args.Hc, HB=args.HB)
    pts = [complex(*p) for p in _json_arg(args.points)] if args.points else [1j, 0.3 + 1.2j, -0.4 + 0.9j]
    return fj_degeneration_check(L, args.k, pts, cfg)


def cmd_doubling_mstar(args):
    from .doubling import mstar_completion

    V = mstar_completion(_json_arg(args.W), args.genus)
    return {"member": V is not None, "completion": None if V is None else [[int(x) for x in r] for r in V.tolist()]}


def cmd_cycles_expand(args):
    from .cycles import canonicalise, expand_ordinary, expand_primitive
    from .lattice import discriminant_group

    L = _lattice(args)
    D = discriminant_group(L)
    T = [[Fraction(x) for x in r] for r in _json_arg(args.T)]
    alpha = tuple(_json_arg(args.alpha))
    s = expand_ordinary(D, T, alpha) if args.kind == "ord" else expand_primitive(D, T, alpha)
    if args.canonical:
        s = canonicalise(D, s)
    return {"kind": args.kind, "terms": s.to_list()}


def cmd_cycles_verify(args):
    from .cycles import verify_inversion

    L = _lattice(args)
    return verify_inversion(L, args.genus, Fraction(args.trace_bound))


def cmd_selftest(args):
    from . import selftest

    return selftest.run(quick=args.quick, seed=args.seed)


# parser ----------------------------------------------------------------------------------


def _add_lattice(p):
    p.add_argument("--lattice", help="lattice JSON file or inline JSON {'gram': ...}")
    p.add_argument("--gram", help="inline Gram matrix as JSON")


def _add_series(p):
    p.add_argument("-H", type=int, default=60, help="coset height bound")
    p.add_argument("-Q", type=int, default=64, help="x-grid size")
    p.add_argument("-Y", type=float, default=6.0, help="y cutoff for fundamental-domain integrals")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vvsiegel", description="Vector-valued Siegel modular form toolkit")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--output", help="write the result here instead of stdout")
    groups = ap.add_subparsers(dest="group", required=True)

    lat = groups.add_parser("lattice").add_subparsers(dest="cmd", required=True)
    p = lat.add_parser("info")
    _add_lattice(p)
    p.set_defaults(func=cmd_lattice_info)

    wr = groups.add_parser("weilrep").add_subparsers(dest="cmd", required=True)
    p = wr.add_parser("matrix")
    _add_lattice(p)
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--word", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_weilrep_matrix)

    ex = groups.add_parser("expansion").add_subparsers(dest="cmd", required=True)
    p = ex.add_parser("phi")
    p.add_argument("--table", required=True)
    p.add_argument("--beta", required=True)
    p.set_defaults(func=cmd_expansion_phi)
    p = ex.add_parser("symmetry")
    p.add_argument("--table", required=True)
    p.add_argument("--A", required=True)
    p.set_defaults(func=cmd_expansion_symmetry)
    p = ex.add_parser("cusp")
    p.add_argument("--table", required=True)
    p.add_argument("--tol", type=float, default=0.0)
    p.set_defaults(func=cmd_expansion_cusp)
    p = ex.add_parser("reduce")
    p.add_argument("--T", required=True)
    p.set_defaults(func=cmd_expansion_reduce)

    se = groups.add_parser("series").add_subparsers(dest="cmd", required=True)
    p = se.add_parser("eis1")
    _add_lattice(p)
    _add_series(p)
    p.add_argument("-k", required=True)
    p.add_argument("--mmax", type=int, default=3)
    p.set_defaults(func=cmd_series_eis1)
    p = se.add_parser("pet-const")
    p.add_argument("-k", required=True)
    p.add_argument("-g", type=int, default=1)
    p.add_argument("--check")
    p.set_defaults(func=cmd_series_pet_const)
    p = se.add_parser("unfold-demo")
    _add_lattice(p)
    _add_series(p)
    p.add_argument("-k", type=int, default=12)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--nodes", type=int, default=24)
    p.set_defaults(func=cmd_series_unfold_demo)
    p = se.add_parser("poincare-pairing")
    _add_lattice(p)
    _add_series(p)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--nodes", type=int, default=24)
    p.set_defaults(func=cmd_series_poincare)

    do = groups.add_parser("doubling").add_subparsers(dest="cmd", required=True)
    p = do.add_parser("enum")
    p.add_argument("--genus", type=int, default=2)
    p.add_argument("--height", type=int, default=1)
    p.add_argument("--stratify", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_doubling_enum)
    p = do.add_parser("setofrep-check")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--height", type=int, default=2)
    p.set_defaults(func=cmd_doubling_setofrep)
    p = do.add_parser("fj-check")
    _add_lattice(p)
    p.add_argument("-k", type=int, default=6)
    p.add_argument("-H", type=int, default=60)
    p.add_argument("--Hw", type=int, default=4)
    p.add_argument("--Hc", type=int, default=3)
    p.add_argument("--HB", type=int, default=4)
    p.add_argument("--points", help="JSON list of [x, y] pairs for tau_4")
    p.set_defaults(func=cmd_doubling_fj)
    p = do.add_parser("mstar")
    p.add_argument("--W", required=True)
    p.add_argument("--genus", type=int, required=True)
    p.set_defaults(func=cmd_doubling_mstar)

    cy = groups.add_parser("cycles").add_subparsers(dest="cmd", required=True)
    p = cy.add_parser("expand")
    _add_lattice(p)
    p.add_argument("--kind", choices=["prim", "ord"], required=True)
    p.add_argument("--T", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--canonical", action="store_true")
    p.set_defaults(func=cmd_cycles_expand)
    p = cy.add_parser("verify")
    _add_lattice(p)
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--trace-bound", default="6")
    p.set_defaults(func=cmd_cycles_verify)

    p = groups.add_parser("selftest")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


DOMAIN_ERRORS = (ValueError, ArithmeticError, RuntimeError, KeyError, TypeError, OSError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    random.seed(args.seed)
    np.random.seed(args.seed % (2**32))
    try:
        result = args.func(args)
    except DOMAIN_ERRORS as exc:
        sys.stdout.write(dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n")
        return 1
    text = result if isinstance(result, str) else dumps(result)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    if isinstance(result, dict) and result.get("ok") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
