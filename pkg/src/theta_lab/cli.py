"""``theta-lab`` command line.

Exit codes: 0 success, 1 failed verification, 2 unparsable input, 3 evaluation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Dict, Iterable, List, Optional

from . import __version__
from .cm import CMContext, theta_gamma_cm
from .cocycle import cusp_degeneration, theta_cycle, theta_gamma, theta_stabilized, theta_telescoped
from .domain import (
    TorsionCycle,
    TorsionPoint,
    format_complex,
    parse_complex,
    parse_coord,
    parse_cycle,
    parse_matrix,
    parse_tau,
)
from .errors import ParseError, ThetaLabError
from .hecke import fit_kappa, verify_equivariance
from .series import SeriesParams, e1, e2, k_continued_ex, k_direct_ex
from .verify import CUSP_LADDER, HECKE_GAMMAS, HECKE_TAUS, SUITES, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_EVAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ParseError: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _cx(z: complex) -> Dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def _row(params: dict, value: complex, est_error: Optional[float] = None, **extra) -> dict:
    row = {"params": params, "value": _cx(value), "est_error": est_error}
    row.update(extra)
    return row


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list):
        out[prefix] = json.dumps(obj, sort_keys=True)
    else:
        out[prefix] = obj


def _emit(rows: List[dict], fmt: str, output: Optional[str]) -> None:
    if fmt == "csv":
        flat = []
        for r in rows:
            d: dict = {}
            _flatten("", r, d)
            flat.append(d)
        keys = sorted({k for d in flat for k in d})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        text = buf.getvalue()
    else:
        text = json.dumps(rows[0] if len(rows) == 1 else rows, sort_keys=True, indent=2) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(args) -> SeriesParams:
    overrides = {}
    if getattr(args, "tol", None) is not None:
        overrides["tol"] = args.tol
    if getattr(args, "radius", None) is not None:
        overrides["max_radius"] = args.radius
    return SeriesParams.from_env(**overrides)


def _parse_z(text: str):
    return parse_coord(text) if "," in text else parse_complex(text)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    tau = parse_tau(args.tau)
    z = _parse_z(args.z)
    params = _params(args)
    info = {"kind": args.kind, "tau": format_complex(tau.tau), "z": str(z) if not isinstance(z, complex) else format_complex(z), "tol": params.tol}
    t = tau.tau
    if args.kind == "k":
        u = parse_complex(args.u)
        zc = z if isinstance(z, complex) else complex(float(z.u) - t * float(z.v))
        info.update(a=args.a, s=format_complex(args.s), u=format_complex(u), method=args.method)
        fn = k_direct_ex if args.method == "direct" else k_continued_ex
        res = fn(args.a, args.s, t, zc, u, params)
        _emit([_row(info, res.value, res.est_error)], args.format, args.output)
        return EXIT_OK
    value = (e1 if args.kind == "e1" else e2)(tau, z, params)
    _emit([_row(info, value, params.tol)], args.format, args.output)
    return EXIT_OK


def _points(args) -> TorsionCycle:
    if args.cycle:
        return parse_cycle(args.cycle)
    if args.point:
        return parse_cycle(args.point)
    raise ParseError("one of --point or --cycle is required")


def cmd_theta(args) -> int:
    tau = parse_tau(args.tau)
    g = parse_matrix(args.matrix)
    cycle = _points(args)
    params = _params(args)
    info = {"matrix": args.matrix, "tau": format_complex(tau.tau), "tol": params.tol}
    rows = []
    if args.stabilized is not None:
        value = theta_stabilized(tau, g, cycle, args.stabilized, args.level, params)
        rows.append(_row(dict(info, cycle=str(cycle), c=args.stabilized, level=args.level), value, None))
    else:
        for coeff, pt in cycle:
            value = coeff * theta_gamma(tau, g, pt, params)
            extra = {}
            if args.telescoped:
                tele = coeff * theta_telescoped(tau, [g], pt, params)
                extra = {"telescoped": _cx(tele), "difference": abs(value - tele)}
            rows.append(_row(dict(info, point=str(pt), coeff=coeff), value, None, **extra))
    _emit(rows, args.format, args.output)
    return EXIT_OK


def _verify_payload(res, seed) -> dict:
    out = {
        "suite": res.suite,
        "params": {"seed": seed, "tol": res.tol},
        "cases": res.cases,
        "failures": res.failures,
        "worst_error": res.worst_error,
        "passed": res.passed,
    }
    if res.kappa is not None:
        out["kappa"] = _cx(res.kappa)
    return out


def cmd_verify(args) -> int:
    kwargs = {}
    if args.suite == "hecke":
        kwargs = {"p_values": tuple(args.p) if args.p else (2, 3), "level": args.N}
    params = SeriesParams.from_env()
    res = run_suite(args.suite, seed=args.seed, tol=args.tol, params=params, **kwargs)
    _emit([_verify_payload(res, args.seed)], args.format, args.output)
    print(f"{res.suite}: {res.cases - res.failures}/{res.cases} passed, worst error {res.worst_error:.3e}", file=sys.stderr)
    return EXIT_OK if res.passed else EXIT_VERIFY


def cmd_hecke(args) -> int:
    params = _params(args)
    gammas = [parse_matrix(m) for m in args.gamma] if args.gamma else list(HECKE_GAMMAS)
    taus = [parse_tau(t).tau for t in args.tau] if args.tau else list(HECKE_TAUS)
    reports = [(g, t, verify_equivariance(args.p, args.N, t, g, params=params)) for g in gammas for t in taus]
    kappa, worst = fit_kappa(r for _, _, r in reports)
    rows = [
        {
            "params": {"p": args.p, "N": args.N, "gamma": ",".join(str(v) for v in g.entries()), "tau": format_complex(t)},
            "lhs": _cx(r.lhs),
            "rhs": _cx(r.rhs),
            "residual": r.residual(kappa),
        }
        for g, t, r in reports
    ]
    summary = {"suite": "hecke", "params": {"p": args.p, "N": args.N, "tol": args.tol_check}, "kappa": _cx(kappa), "worst_error": worst, "passed": worst < args.tol_check, "rows": rows}
    _emit([summary], args.format, args.output)
    return EXIT_OK if worst < args.tol_check else EXIT_VERIFY


def cmd_cm_theta(args) -> int:
    ctx = CMContext(parse_tau(args.cm if args.cm.startswith("cm:") else "cm:" + args.cm))
    g = parse_matrix(args.matrix, ctx.pq)
    params = _params(args)
    rows = []
    for coeff, pt in _points(args):
        value = coeff * theta_gamma_cm(ctx, g, pt, params)
        rows.append(_row({"cm": list(ctx.pq), "matrix": args.matrix, "point": str(pt), "coeff": coeff, "tol": params.tol}, value, None))
    _emit(rows, args.format, args.output)
    return EXIT_OK


def cmd_cusp(args) -> int:
    g = parse_matrix(args.matrix)
    x = _points(args)
    if len(x) != 1:
        raise ParseError("cusp takes a single point")
    (_, pt), = list(x)
    ys = [float(y) for y in args.ys.split(",")] if args.ys else list(CUSP_LADDER)
    rep = cusp_degeneration(g, pt, ys, _params(args), tol=args.tol_check)
    row = {
        "params": {"matrix": args.matrix, "point": str(pt), "ys": ys},
        "value": _cx(rep.limit),
        "est_error": max((abs(b - a) for a, b in zip(rep.ratios, rep.ratios[1:])), default=0.0),
        "bernoulli": _cx(rep.bernoulli),
        "ratios": [_cx(r) for r in rep.ratios],
        "stable": rep.stable,
    }
    _emit([row], args.format, args.output)
    return EXIT_OK if rep.stable else EXIT_VERIFY


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="theta-lab", description="Eisenstein theta-lift cocycle toolkit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tol=True):
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", help="write to this path instead of stdout")
        if tol:
            sp.add_argument("--tol", type=float, help="series tolerance (default: THETA_LAB_TOL or 1e-12)")
            sp.add_argument("--radius", type=int, help="maximum lattice radius")

    sp = sub.add_parser("eval", help="evaluate E1, E2 or K_a")
    sp.add_argument("kind", choices=("e1", "e2", "k"))
    sp.add_argument("--tau", default="i")
    sp.add_argument("--z", required=True, help="'u,v' torsion coordinates or a complex number")
    sp.add_argument("--a", type=int, default=0)
    sp.add_argument("--s", type=parse_complex, default=2.0)
    sp.add_argument("--u", default="0")
    sp.add_argument("--method", choices=("continued", "direct"), default="continued")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("theta", help="evaluate the cocycle")
    sp.add_argument("--matrix", required=True, help="'a,b;c,d'")
    sp.add_argument("--point")
    sp.add_argument("--cycle")
    sp.add_argument("--tau", default="i")
    sp.add_argument("--telescoped", action="store_true")
    sp.add_argument("--stabilized", type=int, metavar="C")
    sp.add_argument("--level", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_theta)

    sp = sub.add_parser("verify", help="run a property suite")
    sp.add_argument("suite", choices=tuple(SUITES))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--p", type=int, action="append")
    sp.add_argument("--N", type=int, default=5)
    common(sp, tol=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("hecke", help="fiberwise against modular T_p")
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--N", type=int, default=5)
    sp.add_argument("--gamma", action="append", help="element of Gamma_1(N), repeatable")
    sp.add_argument("--tau", action="append", help="repeatable")
    sp.add_argument("--tol-check", type=float, default=1e-4, dest="tol_check")
    common(sp)
    sp.set_defaults(func=cmd_hecke)

    sp = sub.add_parser("cm-theta", help="cocycle over an imaginary quadratic order")
    sp.add_argument("--cm", required=True, help="'p,q' with tau^2 = p tau + q")
    sp.add_argument("--matrix", required=True, help="entries like 1+tau, 2, -tau")
    sp.add_argument("--point")
    sp.add_argument("--cycle")
    common(sp)
    sp.set_defaults(func=cmd_cm_theta)

    sp = sub.add_parser("cusp", help="degeneration along tau = iy")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("--cycle")
    sp.add_argument("--ys", help="comma-separated increasing heights")
    sp.add_argument("--tol-check", type=float, default=1e-3, dest="tol_check")
    common(sp)
    sp.set_defaults(func=cmd_cusp)
    return p


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ThetaLabError, ValueError, ArithmeticError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
