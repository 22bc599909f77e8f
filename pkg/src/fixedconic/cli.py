"""Command-line front end.

Exit status: 0 on success or a passing verification, 1 when verification
fails or execution breaks down, 2 on usage errors (bad arguments, malformed
expressions or conics, a fixed conic that is a circle or degenerate).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import mpmath

from . import __version__, trace
from .conic import (
    Central,
    ConicImplicit,
    FocusDirectrix,
    classify,
    focus_directrix_to_implicit,
    implicit_to_focus_directrix,
    to_regular,
    true_eccentricity,
)
from .errors import ConicError, InvalidFixedConic, MalformedProgram, NotAConic
from .executor import execute, report_for
from .expr import ExprSyntaxError, parse
from .expr import eval as eval_expr
from .numeric import Precision, decimal
from .planner import compile as compile_expr
from .planner import compile_trisection
from .render import render

GRAMMAR = """\
expression grammar:
  expr  := term (("+" | "-") term)*
  term  := unary (("*" | "/") unary)*
  unary := "-" unary | atom
  atom  := RATIONAL | "i" | "(" expr ")" | ("sqrt" | "cbrt" | "conj") "(" expr ")"
  RATIONAL is digits or digits/digits with no spaces, so 1/2 is one literal.
  Roots are principal branches; cbrt of a negative real has argument pi/3.

conics are six coefficients a,b,c,d,e,f of a x^2 + b xy + c y^2 + d x + e y + f = 0
(integers, p/q or decimals). Write --conic=-1,0,4,0,0,-4 when the list starts with '-'.
"""

DEFAULT_CONIC = "1,0,4,0,0,-4"


class UsageError(Exception):
    pass


def _rationals(text: str, n: int, what: str) -> list[Fraction]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers, got {text!r}")
    try:
        return [Fraction(p) for p in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number in {what} {text!r}: {exc}") from exc


def parse_conic(text: str) -> ConicImplicit:
    return ConicImplicit(*_rationals(text, 6, "conic"))


def conic_from_args(args, required: bool = True) -> ConicImplicit:
    fd = [args.focus, args.directrix, args.ecc]
    if any(v is not None for v in fd):
        if args.conic is not None:
            raise UsageError("give either --conic or --focus/--directrix/--ecc, not both")
        if any(v is None for v in fd):
            raise UsageError("--focus, --directrix and --ecc must be given together")
        fx, fy = _rationals(args.focus, 2, "focus")
        nx, ny, off = _rationals(args.directrix, 3, "directrix")
        (ecc,) = _rationals(args.ecc, 1, "eccentricity")
        try:
            return focus_directrix_to_implicit(FocusDirectrix((fx, fy), (nx, ny), off, ecc))
        except ConicError as exc:
            raise UsageError(str(exc)) from exc
    if args.conic is None:
        if required:
            raise UsageError("a fixed conic is required (--conic or --focus/--directrix/--ecc)")
        return parse_conic(DEFAULT_CONIC)
    return parse_conic(args.conic)


def _expr(text: str):
    try:
        return parse(text)
    except ExprSyntaxError as exc:
        raise UsageError(f"{exc}\n  {text}\n  {' ' * exc.position}^") from exc


def _complex(z, prec: Precision) -> str:
    re_part, im_part = decimal(z.real, prec), decimal(abs(z.imag), prec)
    sign = "-" if z.imag < 0 else "+"
    return f"{re_part} {sign} {im_part}i"


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _print_report(r, prec: Precision, as_json: bool) -> int:
    if as_json:
        print(json.dumps(trace.report_dict(r), indent=2))
    else:
        with prec.context():
            print(f"constructed  {_complex(r.constructed, prec)}")
            print(f"oracle       {_complex(r.oracle, prec)}")
            print(f"abs_error    {mpmath.nstr(r.abs_error, 6)} (tau {mpmath.nstr(r.tau, 6)})")
            print(f"max residual {mpmath.nstr(r.max_step_residual, 6)}")
        print(f"conic_intersections_executed {r.conic_intersections_executed}")
        print(f"conic_depth {r.conic_depth}")
        print(f"precision {r.precision_used} bits")
        for v in r.audit:
            print(f"audit violation: {v}")
        print("PASS" if r.passed else "FAIL")
    return 0 if r.passed else 1


def _oracle(p, prec: Precision):
    if not p.metadata.expression:
        raise UsageError("trace carries no expression, so there is no oracle to compare against")
    return eval_expr(_expr(p.metadata.expression), prec)


# --- commands --------------------------------------------------------------

def cmd_compile(args) -> int:
    prec = Precision(args.precision)
    p = compile_expr(_expr(args.expression), conic_from_args(args), args.mode, prec)
    _emit(trace.dumps(p), args.output)
    if args.output:
        print(f"wrote {len(p.steps)} steps, {len(p.conic_steps())} conic intersections, conic_depth {p.metadata.conic_depth} to {args.output}")
    return 0


def cmd_run(args) -> int:
    p = trace.load(args.trace)
    prec = Precision(args.precision or p.metadata.compile_precision_bits)
    val = execute(p, prec)
    with prec.context():
        print(_complex(val[p.final], prec))
    return 0


def cmd_verify(args) -> int:
    if args.trace:
        if args.expression or args.conic or args.focus:
            raise UsageError("--trace replaces the expression and conic arguments")
        p = trace.load(args.trace)
        prec = Precision(args.precision or p.metadata.compile_precision_bits)
    else:
        if not args.expression:
            raise UsageError("verify needs an expression or --trace")
        prec = Precision(args.precision or 256)
        p = compile_expr(_expr(args.expression), conic_from_args(args), args.mode, prec)
        if args.output:
            trace.save(p, args.output)
    return _print_report(report_for(p, _oracle(p, prec), prec), prec, args.json)


def cmd_classify(args) -> int:
    if args.coefficients is not None:
        if args.conic is not None:
            raise UsageError("give the coefficients once")
        args.conic = args.coefficients
    k = conic_from_args(args)
    prec = Precision(args.precision)
    kind = classify(k, prec)
    coeffs = ",".join(str(Fraction(c)) for c in k.coeffs)
    if not kind.proper:
        print(f"{kind.value} ({coeffs}): not usable as a fixed conic")
        return 0
    frame, r = to_regular(k, prec)
    with prec.context():
        ecc = true_eccentricity(r)
        print(f"{kind.value}, true eccentricity {mpmath.nstr(ecc, 16)} ({coeffs})")
        print(f"working frame cos {mpmath.nstr(mpmath.mpf(frame.cos), 16)} sin {mpmath.nstr(mpmath.mpf(frame.sin), 16)}")
        if isinstance(r, Central):
            al, be = r.center
            print(f"regular form {mpmath.nstr(r.u, 16)} (x - {mpmath.nstr(al, 16)})^2 + (y - {mpmath.nstr(be, 16)})^2 = {mpmath.nstr(r.rhs, 16)}")
            print(f"form parameter u = {mpmath.nstr(r.u, 16)}, orientation class {r.class_sign:+d}")
        else:
            print(f"regular form x = {mpmath.nstr(r.lam, 16)} (y - {mpmath.nstr(r.a, 16)})^2 + {mpmath.nstr(r.b, 16)}")
        try:
            for fd in implicit_to_focus_directrix(k, prec):
                fx, fy = (mpmath.nstr(v, 12) for v in fd.focus)
                nx, ny = (mpmath.nstr(v, 12) for v in fd.normal)
                print(f"focus ({fx}, {fy}), directrix {nx} x + {ny} y = {mpmath.nstr(fd.offset, 12)}")
        except NotAConic:
            pass
    return 0


def cmd_render(args) -> int:
    p = trace.load(args.trace)
    prec = Precision(args.precision) if args.precision else None
    _emit(render(p, prec), args.output)
    return 0


def cmd_double_cube(args) -> int:
    prec = Precision(args.precision)
    conic = conic_from_args(args, required=False)
    p = compile_expr(parse("cbrt(2)"), conic, args.mode, prec)
    if args.output:
        trace.save(p, args.output)
    return _print_report(report_for(p, _oracle(p, prec), prec), prec, args.json)


def cmd_trisect(args) -> int:
    prec = Precision(args.precision)
    (q,) = _rationals(args.cos, 1, "cosine")
    if not -1 <= q <= 1:
        raise UsageError(f"--cos must lie in [-1, 1], got {q}")
    conic = conic_from_args(args, required=False)
    p = compile_trisection(q, conic, args.mode, prec)
    if args.output:
        trace.save(p, args.output)
    r = report_for(p, _oracle(p, prec), prec)
    if not args.json:
        with prec.context():
            print(f"cos(acos({q})/3) = {mpmath.nstr(r.constructed.real, 16)}")
    return _print_report(r, prec, args.json)


# --- argument parsing ------------------------------------------------------

def _add_conic(p: argparse.ArgumentParser) -> None:
    p.add_argument("--conic", help="fixed conic coefficients a,b,c,d,e,f")
    p.add_argument("--focus", help="focus fx,fy (with --directrix and --ecc)")
    p.add_argument("--directrix", help="directrix nx,ny,c meaning nx x + ny y = c")
    p.add_argument("--ecc", help="eccentricity (rational)")


def _add_mode(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("fixed", "lemma"), default="fixed", help="conic policy (default fixed)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixedconic",
        description="Compile cube roots and trisections into ruler, compass and one fixed conic.",
        epilog=GRAMMAR,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=GRAMMAR,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = command("compile", cmd_compile, "compile an expression into a trace file")
    p.add_argument("expression")
    _add_conic(p)
    _add_mode(p)
    p.add_argument("--precision", type=int, default=256, help="compile precision in bits (default 256)")
    p.add_argument("--output", help="trace path (default stdout)")

    p = command("run", cmd_run, "execute a trace and print the constructed point")
    p.add_argument("trace")
    p.add_argument("--precision", type=int, help="execution precision (default: the trace's)")

    p = command("verify", cmd_verify, "compile (or load) and check against direct evaluation")
    p.add_argument("expression", nargs="?")
    p.add_argument("--trace", help="verify an existing trace instead")
    _add_conic(p)
    _add_mode(p)
    p.add_argument("--precision", type=int, help="bits (default 256, or the trace's)")
    p.add_argument("--output", help="also save the compiled trace here")
    p.add_argument("--json", action="store_true", help="print the report as JSON")

    p = command("classify", cmd_classify, "classify a conic and show its regular form")
    p.add_argument("coefficients", nargs="?", help="a,b,c,d,e,f")
    _add_conic(p)
    p.add_argument("--precision", type=int, default=256)

    p = command("render", cmd_render, "draw a trace as an SVG figure")
    p.add_argument("trace")
    p.add_argument("--output", help="SVG path (default stdout)")
    p.add_argument("--precision", type=int)

    for name, func, help_text in (
        ("double-cube", cmd_double_cube, "construct cbrt(2) with the fixed conic"),
        ("trisect", cmd_trisect, "construct cos(theta/3) from cos(theta)"),
    ):
        p = command(name, func, help_text)
        if name == "trisect":
            p.add_argument("--cos", required=True, help="cos(theta) as a rational in [-1, 1]")
        _add_conic(p)
        _add_mode(p)
        p.add_argument("--precision", type=int, default=256)
        p.add_argument("--output", help="also save the trace here")
        p.add_argument("--json", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "precision", None) is not None and args.precision < 64:
            raise UsageError("--precision must be at least 64 bits")
        return args.func(args)
    except (UsageError, InvalidFixedConic, MalformedProgram, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConicError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
