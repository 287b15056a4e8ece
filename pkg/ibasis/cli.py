"""
Command-line front end.

    ibasis compute "x^3*D^3 + x*D - 1"
    ibasis check "(x-1) + D - x*D^2" --element "1/x - (1/x)*D"
    ibasis solutions "1 + x*D" --at 0 --terms 3
    ibasis bounds "x^3*D^3 + x*D - 1" --at 0
    ibasis hermite input.json

Exit codes: 0 success, 1 usage or internal error, 2 mathematical rejection,
3 resource cap. Errors and (with --verbose) the log go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from ibasis import __version__
from ibasis.core.closure import (
    IntegralBasis,
    check_integral,
    integral_basis,
    is_globally_integral,
)
from ibasis.core.config import (
    DEFAULT_JOBS,
    DISPLAY_TERMS,
    MAX_WRONSKIAN_TERMS,
    SCHEMA_VERSION,
    load_json_file,
    save_json_file,
)
from ibasis.core.errors import IBasisError, UsageError
from ibasis.core.exactmath import NumberField, SplitEvent
from ibasis.core.hermite import BasisVector, hermite_reduce
from ibasis.core.localsolver import (
    classify_point,
    describe_point,
    local_solutions,
    truncation_bounds,
)
from ibasis.core.logger import clear_logs, get_logs, log, set_echo
from ibasis.core.logseries import IotaPolicy, is_integral
from ibasis.core.oreops import reduce_mod
from ibasis.core.parser import format_series, parse_operator, parse_polynomial


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_GLOBAL_DEFAULTS = {
    "format": "text",
    "iota": None,
    "max_wronskian_terms": MAX_WRONSKIAN_TERMS,
    "jobs": DEFAULT_JOBS,
    "seed": None,
    "verbose": False,
    "output": None,
}


def _common_options() -> argparse.ArgumentParser:
    # accepted before or after the subcommand
    common = _ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--iota", metavar="FILE", default=argparse.SUPPRESS,
                        help="JSON iota-policy overrides")
    common.add_argument("--max-wronskian-terms", type=int, metavar="N", default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, metavar="N", default=argparse.SUPPRESS,
                        help="points evaluated in parallel during refinement")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="recorded in the output; the computation is deterministic")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--output", metavar="FILE", default=argparse.SUPPRESS,
                        help="also write the JSON document to FILE")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _ArgumentParser(prog="ibasis", parents=[common],
                             description="Integral bases of D-finite function algebras.")
    parser.add_argument("--version", action="version", version=f"ibasis {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_ArgumentParser)

    p = sub.add_parser("compute", parents=[common], help="integral basis of Q(x)[D]/<L>")
    p.add_argument("operator")
    p.add_argument("--init", choices=("chain", "power"), default="chain",
                   help="stage start s*D*B_{d-1} (chain) or s^d*D^d*B_0 (power)")

    p = sub.add_parser("check", parents=[common], help="integrality of an element or of L itself")
    p.add_argument("operator")
    p.add_argument("--element", help="element of Q(x)[D], reduced modulo L")

    p = sub.add_parser("solutions", parents=[common], help="local generalized series solutions")
    p.add_argument("operator")
    p.add_argument("--at", required=True, help="rational number or poly-root:p(t)")
    p.add_argument("--terms", type=int, default=DISPLAY_TERMS)

    p = sub.add_parser("bounds", parents=[common], help="local exponents, Wronskian offset and truncation orders")
    p.add_argument("operator")
    p.add_argument("--at", required=True, help="rational number or poly-root:p(t)")

    p = sub.add_parser("hermite", parents=[common], help="Hermite reduction of an integrand")
    p.add_argument("input", help="JSON document, or - for stdin")
    return parser


def parse_point(text: str) -> NumberField:
    text = text.strip()
    if text.startswith("poly-root:"):
        p = parse_polynomial(text[len("poly-root:"):], var="t")
        try:
            return NumberField(p)
        except ValueError as e:
            raise UsageError(f"bad point {text!r}: {e}")
    try:
        return NumberField.rational(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}: expected a rational number or poly-root:p(t)")


def _per_component(field: NumberField, fn) -> list:
    """fn(field), redone on each factor of the modulus when it turns out reducible."""
    try:
        return [fn(field)]
    except SplitEvent as event:
        log(f"SPLIT {field.modulus} -> {', '.join(str(f) for f in event.factors)}")
        out = []
        for f in event.factors:
            out.extend(_per_component(NumberField(f), fn))
        return out


def _policy(args) -> IotaPolicy:
    return IotaPolicy.load(args.iota) if args.iota else IotaPolicy()


# -----------------------------------------------------------
# COMMANDS
# -----------------------------------------------------------
def cmd_compute(args) -> dict:
    L = parse_operator(args.operator)
    basis = integral_basis(
        L, _policy(args),
        jobs=args.jobs,
        max_wronskian_terms=args.max_wronskian_terms,
        init=args.init,
    )
    return {
        "operator": str(L),
        "basis": basis.to_strings(),
        "points": basis.diagnostics.get("points", []),
        "refinements": basis.diagnostics.get("refinements", []),
    }


def cmd_check(args) -> dict:
    L = parse_operator(args.operator)
    policy = _policy(args)
    if args.element is None:
        return {"operator": str(L), "integral": is_globally_integral(L, policy)}
    B = reduce_mod(L, parse_operator(args.element))
    cert = check_integral(L, B, policy, max_wronskian_terms=args.max_wronskian_terms)
    return {
        "operator": str(L),
        "element": str(B),
        "integral": cert.integral,
        "witnesses": [w.to_dict() for w in cert.witnesses],
    }


def cmd_solutions(args) -> dict:
    L = parse_operator(args.operator)
    policy = _policy(args)
    if args.terms < 1:
        raise UsageError("--terms must be at least 1")

    def at(field):
        kind = classify_point(L, field)
        shown = local_solutions(L, field, args.terms)
        exact = local_solutions(L, field, None)
        return {
            "point": describe_point(field),
            "kind": kind.value,
            "solutions": [
                {
                    "exponent": str(s.exponent),
                    "logdegree": s.logdegree,
                    "series": format_series(s.series),
                    "integral": is_integral(p.series, policy),
                }
                for s, p in zip(shown, exact)
            ],
        }

    return {"operator": str(L), "points": _per_component(parse_point(args.at), at)}


def cmd_bounds(args) -> dict:
    L = parse_operator(args.operator)
    policy = _policy(args)

    def at(field):
        data = truncation_bounds(L, field, policy, args.max_wronskian_terms)
        entry = data.summary()
        entry["wronskian_valuation"] = str(data.wronskian_valuation)
        return entry

    return {"operator": str(L), "points": _per_component(parse_point(args.at), at)}


def _load_hermite_input(path, policy, args):
    doc = load_json_file(path)
    if not isinstance(doc, dict):
        raise UsageError("hermite input must be a JSON object")
    try:
        L = parse_operator(doc["operator"])
        if doc.get("basis"):
            elements = tuple(reduce_mod(L, parse_operator(s)) for s in doc["basis"])
            basis = IntegralBasis(L, elements, policy)
        else:
            basis = integral_basis(L, policy, jobs=args.jobs, max_wronskian_terms=args.max_wronskian_terms)
        a = [parse_polynomial(str(s)) for s in doc["a"]]
        u = parse_polynomial(str(doc.get("u", "1")))
        v = parse_polynomial(str(doc["v"]))
        m = int(doc["m"])
    except KeyError as e:
        raise UsageError(f"hermite input is missing {e}")
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad hermite input: {e}")
    return BasisVector(basis, a, u, v, m)


def _vector_doc(vec: BasisVector) -> dict:
    return {
        "numerators": [str(a) for a in vec.numerators],
        "u": str(vec.u),
        "v": str(vec.v),
        "m": vec.m,
    }


def cmd_hermite(args) -> dict:
    f = _load_hermite_input(args.input, _policy(args), args)
    result = hermite_reduce(f)
    return {
        "operator": str(f.operator),
        "basis": [str(e) for e in f.basis],
        "g": _vector_doc(result.g),
        "h": _vector_doc(result.h),
        "steps": [
            {"m": s.m, "b": [str(x) for x in s.b], "c": [str(x) for x in s.c], "u": str(s.u)}
            for s in result.steps
        ],
        "antiderivative": str(result.antiderivative()),
    }


COMMANDS = {
    "compute": cmd_compute,
    "check": cmd_check,
    "solutions": cmd_solutions,
    "bounds": cmd_bounds,
    "hermite": cmd_hermite,
}


# -----------------------------------------------------------
# OUTPUT
# -----------------------------------------------------------
def render_text(doc: dict) -> str:
    lines = []
    command = doc["command"]
    if "operator" in doc:
        lines.append(f"operator: {doc['operator']}")
    if command == "compute":
        lines.append("basis:")
        lines.extend(f"  {b}" for b in doc["basis"])
    elif command == "check":
        if "element" in doc:
            lines.append(f"element: {doc['element']}")
        lines.append(f"integral: {'true' if doc['integral'] else 'false'}")
        for w in doc.get("witnesses", []):
            if w["exponent"] is None:
                lines.append(f"  {w['reason']} at {w['point']}")
            else:
                lines.append(
                    f"  {w['reason']} at {w['point']}: solution {w['solution']}, "
                    f"exponent {w['exponent']}, log power {w['logpow']}"
                )
    elif command == "solutions":
        for point in doc["points"]:
            lines.append(f"point {point['point']} ({point['kind']}):")
            for s in point["solutions"]:
                status = "integral" if s["integral"] else "not integral"
                lines.append(f"  {s['series']}    [{status}]")
    elif command == "bounds":
        for point in doc["points"]:
            lines.append(f"point {point['point']} ({point['kind']}):")
            lines.append(f"  exponents: {', '.join(point['exponents'])}")
            lines.append(f"  log degrees: {', '.join(str(d) for d in point['logdegrees'])}")
            lines.append(f"  wronskian offset m: {point['m']}")
            lines.append(f"  truncation orders N: {', '.join(str(n) for n in point['bounds'])}")
    elif command == "hermite":
        for s in doc["steps"]:
            lines.append(f"step m={s['m']}: b = ({', '.join(s['b'])}), c = ({', '.join(s['c'])})")
        lines.append(f"g: {', '.join(doc['g']['numerators'])} over ({doc['g']['v']})^{doc['g']['m']}")
        lines.append(f"h: {', '.join(doc['h']['numerators'])} over ({doc['h']['u']})*({doc['h']['v']})")
        lines.append(f"antiderivative: {doc['antiderivative']}")
    return "\n".join(lines)


def _with_defaults(args):
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    return args


def parse_args(argv=None) -> argparse.Namespace:
    args = _with_defaults(build_parser().parse_args(argv))
    if not args.command:
        raise UsageError("a command is required (compute, check, solutions, bounds, hermite)")
    return args


def run(args: argparse.Namespace) -> dict:
    """Run the command and return its output document."""
    start = time.perf_counter()
    doc = {"schema": SCHEMA_VERSION, "command": args.command}
    doc.update(COMMANDS[args.command](args))
    doc["seed"] = args.seed
    doc["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    if args.output:
        save_json_file(args.output, doc)
    return doc


def main(argv=None) -> int:
    clear_logs()
    verbose = False
    try:
        args = parse_args(argv)
        verbose = args.verbose
        set_echo(sys.stderr if verbose else None)
        doc = run(args)
    except IBasisError as e:
        if not verbose:
            for line in get_logs():
                print(line, file=sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    finally:
        set_echo(None)

    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(render_text(doc))
    return 0
