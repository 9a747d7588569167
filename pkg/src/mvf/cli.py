"""Command-line front end.

Exit codes: 0 yes or success, 1 decisive no, 2 unknown, 3 error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import ake
from .config import ConfigError, Workspace
from .difference import check_axioms
from .formulas import WitnessSet, evaluate, grid_witnesses, parse_formula, phi_formula, pi_witness
from .groups import WitnessNotFound, dense_witness
from .hahn import HahnSeries, NewtonError, newton_solve
from .literals import LiteralError, parse_series
from .projective import IntPoly
from .values import ZERO, Surd, Value, parse_value

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2, 3

_VERDICT_EXIT = {ake.Verdict.YES: EXIT_OK, ake.Verdict.NO: EXIT_NO, ake.Verdict.UNKNOWN: EXIT_UNKNOWN}


class Reporter:
    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout

    def record(self, fields: list[tuple[str, object]]) -> None:
        if self.fmt == "records":
            self.out.write(" ".join(f"{k}={_quote(v)}" for k, v in fields) + "\n")
        else:
            for k, v in fields:
                self.out.write(f"{k.replace('_', ' ')}: {v}\n")
            self.out.write("\n")


def _quote(v) -> str:
    s = str(v)
    if not s or any(c.isspace() for c in s) or '"' in s:
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return s


def _approx(v) -> str:
    if v is ZERO:
        return "0"
    return f"{float(v):.6g}"


def _exact(v) -> str:
    if isinstance(v, Surd):
        try:
            v = v.to_value()
        except ValueError:
            return str(v)
    return str(v)


def _workspace(args) -> Workspace:
    ws = Workspace()
    for path in args.config or ():
        ws.load(path)
    return ws


def _structure(ws: Workspace, name: str | None):
    if name is None:
        if len(ws.structures) == 1:
            return next(iter(ws.structures.values()))
        raise ConfigError("choose a structure with --structure")
    return ws.get("structure", name)


def _witnesses(ws: Workspace, spec: str, structure) -> WitnessSet:
    kind, _, arg = spec.partition(":")
    if kind == "grid":
        depth, height = (int(x) for x in arg.split(","))
        return grid_witnesses(structure, depth, height)
    if kind == "list":
        return WitnessSet(tuple(ws.witness_points(arg, structure)), f"registered:{arg}")
    raise ConfigError(f"unknown witness strategy {spec!r}")


# commands -------------------------------------------------------------------


def cmd_classify(args, ws: Workspace, rep: Reporter) -> int:
    k = ws.get("field", args.field)
    if not k.dense:
        rep.record([("query", f"classify:{args.field}"), ("verdict", "unknown"),
                    ("rationale", "discrete or trivial value group: compare with equiv using dg")])
        return EXIT_UNKNOWN
    c = ake.class_of(k)
    rep.record([
        ("query", f"classify:{args.field}"),
        ("verdict", c.verdict),
        ("class", c.label()),
        ("shifted", str(c.shifted).lower()),
        ("rationale", "; ".join(c.trace)),
    ])
    return _VERDICT_EXIT[c.verdict]


def cmd_equiv(args, ws: Workspace, rep: Reporter) -> int:
    k1, k2 = ws.get("field", args.first), ws.get("field", args.second)
    trace: list = []
    v = ake.equivalent(k1, k2, trace)
    fields = [("query", f"equiv:{args.first},{args.second}"), ("verdict", v)]
    if k1.dense and k2.dense:
        c1, c2 = ake.class_of(k1), ake.class_of(k2)
        ring = ake.lring_equiv(k1, k2)
        agree = "n/a" if not (ring.decisive and v.decisive) else "agree"
        fields += [("class1", c1.label()), ("class2", c2.label()), ("ring_verdict", ring), ("cross_check", agree)]
    fields.append(("rationale", "; ".join(trace)))
    rep.record(fields)
    return _VERDICT_EXIT[v]


def cmd_eval(args, ws: Workspace, rep: Reporter) -> int:
    s = _structure(ws, args.structure)
    if args.formula == "phi":
        f = phi_formula()
    elif args.formula in ws.formulas:
        f = ws.formulas[args.formula]
    else:
        f = parse_formula(args.formula)
    env = {}
    for item in args.assign or ():
        var, _, pt = item.partition("=")
        env[var.strip()] = ws.point(pt.strip(), s)
    w = _witnesses(ws, args.witness, s)
    res = evaluate(f, env, w, structure=s)
    fields = [
        ("query", f"eval:{args.formula}"),
        ("value", _exact(res.value)),
        ("approx_nonauthoritative", _approx(res.value)),
        ("bound", res.bound_direction),
        ("witnesses", w.provenance),
    ]
    for var, p in res.witness.items():
        fields.append((f"witness_{var}", p))
    rep.record(fields)
    return EXIT_OK


def cmd_hensel(args, ws: Workspace, rep: Reporter) -> int:
    s = _structure(ws, args.structure) if (args.structure or ws.structures) else None
    fh = s.field if s is not None else None
    coeffs = ws.coeff_list(args.poly, fh)
    seed = parse_series(args.seed, fh)
    floor = parse_value(args.floor)
    r = newton_solve(coeffs, seed, floor, args.max_steps)
    terms = r.root.sorted_terms()[: args.show]
    lead = HahnSeries(dict(terms))
    rep.record([
        ("query", "hensel"),
        ("steps", r.steps),
        ("step_bound", r.step_bound),
        ("terms", len(r.root.terms)),
        ("leading", lead),
        ("residual_valuation", _exact(r.residual)),
        ("approx_nonauthoritative", _approx(r.residual)),
        ("floor", floor),
    ])
    return EXIT_OK


def _default_polys():
    return [
        IntPoly.from_dict(1, {(1,): 1}),
        IntPoly.from_dict(1, {(2,): 1, (0,): 1}),
        IntPoly.from_dict(2, {(1, 1): 1, (0, 0): -1}),
        IntPoly.from_dict(2, {(1, 0): 1, (0, 1): -1}),
        IntPoly.from_dict(3, {(1, 1, 0): 1, (0, 0, 1): -1}),
    ]


def cmd_check(args, ws: Workspace, rep: Reporter) -> int:
    s = _structure(ws, args.structure)
    sigma = s.sigma
    if args.auto:
        sigma = ws.autos[args.auto].build(ws, s.field, args.auto) if args.auto in ws.autos else None
        if sigma is None:
            raise ConfigError(f"unknown automorphism {args.auto!r}")
    pts = list(_witnesses(ws, args.witness, s).points)
    report = check_axioms(s, sigma, _default_polys(), pts, samples=args.samples, seed=args.seed)
    fields = [("query", f"check:{s.name}"), ("verdict", "pass" if report.passed else "fail")]
    fields += [(f"checked_{k}", v) for k, v in report.checked.items()]
    fields.append(("violations", len(report.violations)))
    if report.violations:
        v = report.violations[0]
        fields += [("first_axiom", v.axiom), ("first_detail", v.detail),
                   ("first_witness", ", ".join(str(w) for w in v.witness))]
    if report.notes:
        fields.append(("notes", "; ".join(report.notes)))
    rep.record(fields)
    return EXIT_OK if report.passed else EXIT_NO


def cmd_pi(args, ws: Workspace, rep: Reporter) -> int:
    s = _structure(ws, args.structure)
    w = _witnesses(ws, args.witness, s)
    code = EXIT_OK
    for n in range(args.n_from, args.n + 1):
        try:
            pw = pi_witness(s, n, args.bound, w)
        except WitnessNotFound as exc:
            rep.record([("query", f"pi:{n}"), ("verdict", "not_found"), ("rationale", exc)])
            code = EXIT_UNKNOWN
            continue
        rep.record([
            ("query", f"pi:{n}"),
            ("point", pw.point),
            ("abs", pw.exponent),
            ("approx_nonauthoritative", _approx(pw.exponent)),
            ("phi", _exact(pw.phi.value)),
            ("bound", pw.phi.bound_direction),
        ])
    return code


def cmd_density(args, ws: Workspace, rep: Reporter) -> int:
    g = ws.get("group", args.group)
    targets = args.target
    code = EXIT_OK
    for t in targets:
        q = Value.from_rational(Fraction(t))
        try:
            w = dense_witness(g, q, Fraction(args.tolerance), args.bound)
        except (WitnessNotFound, ValueError) as exc:
            rep.record([("query", f"density:{t}"), ("verdict", "not_found"), ("rationale", exc)])
            code = EXIT_UNKNOWN
            continue
        rep.record([("query", f"density:{t}"), ("element", w), ("approx_nonauthoritative", _approx(w))])
    return code


class _Parser(argparse.ArgumentParser):
    # usage errors share the error exit code rather than argparse's 2, which means unknown here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append", help="workspace file (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("human", "records"), default="human")
    common.add_argument("--witness", default="grid:1,1", help="grid:<depth>,<height> or list:<name>")
    common.add_argument("--floor", default="2^-20", help="value literal")

    p = _Parser(prog="mvf", description="Exact tools for metric valued difference fields.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="class C(D, l) of a declared field")
    c.add_argument("field")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("equiv", parents=[common], help="elementary equivalence of two declared fields")
    c.add_argument("first")
    c.add_argument("second")
    c.set_defaults(func=cmd_equiv)

    c = sub.add_parser("eval", parents=[common], help="evaluate a formula over witnesses")
    c.add_argument("formula", help="declared name, 'phi', or formula text")
    c.add_argument("--structure")
    c.add_argument("--assign", action="append", help="var=point (name or literal)")
    c.set_defaults(func=cmd_eval)

    c = sub.add_parser("hensel", parents=[common], help="Newton root of a polynomial")
    c.add_argument("poly", help="declared poly name or [c0, c1, ...]")
    c.add_argument("seed")
    c.add_argument("--structure")
    c.add_argument("--max-steps", type=int)
    c.add_argument("--show", type=int, default=4, help="leading terms to print")
    c.set_defaults(func=cmd_hensel)

    c = sub.add_parser("check", parents=[common], help="sample-check the difference field axioms")
    c.add_argument("--structure")
    c.add_argument("--auto")
    c.add_argument("--samples", type=int, default=100)
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("pi", parents=[common], help="points realizing the finite pieces of the almost-one type")
    c.add_argument("n", type=int)
    c.add_argument("--n-from", type=int, default=None)
    c.add_argument("--bound", type=int, default=60)
    c.add_argument("--structure")
    c.set_defaults(func=cmd_pi)

    c = sub.add_parser("density", parents=[common], help="group elements near rational targets")
    c.add_argument("group")
    c.add_argument("target", nargs="+")
    c.add_argument("--tolerance", default="1/100")
    c.add_argument("--bound", type=int, default=40)
    c.set_defaults(func=cmd_density)
    return p


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n_from", 0) is None:
        args.n_from = args.n
    rep = Reporter(args.format, out)
    try:
        ws = _workspace(args)
        return args.func(args, ws, rep)
    except (ConfigError, LiteralError, NewtonError, ValueError, ArithmeticError, KeyError) as exc:
        (out or sys.stdout).flush()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
