"""Versioned JSON trace files for construction programs and reports.

Rationals are written as ``p/q`` strings so they load back exactly; reals
(hints, working frame) are decimal strings with the compile precision's
digit count, which is what the planner stored in the program already.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .conic import ConicImplicit
from .errors import MalformedProgram
from .expr import GaussianRational
from .numeric import Precision, decimal
from .program import (
    FIELD_OPS,
    FIXED,
    CentralRef,
    CircleDef,
    ConicIntersect,
    ConstructionProgram,
    FixedRef,
    IntersectBasic,
    LineDef,
    MacroField,
    MacroSqrt,
    Metadata,
    ParabolaRef,
    PointLit,
    SelectorHint,
)

VERSION = "1"


def _hint(pick: SelectorHint) -> dict:
    return {"x": pick.x, "y": pick.y, "min_separation": pick.min_separation}


def _conic_ref(ref) -> object:
    if isinstance(ref, FixedRef):
        return "fixed"
    if isinstance(ref, CentralRef):
        return {"form": "central", "u": ref.u, "center": ref.center, "rhs": ref.rhs}
    return {"form": "parabola", "lam": ref.lam, "a": ref.a, "b": ref.b}


def step_record(i: int, step) -> dict:
    if isinstance(step, PointLit):
        return {"id": i, "kind": "point", "args": [str(step.value)]}
    if isinstance(step, MacroField):
        return {"id": i, "kind": step.op, "args": list(step.args)}
    if isinstance(step, MacroSqrt):
        return {"id": i, "kind": "sqrt", "args": [step.arg]}
    if isinstance(step, CircleDef):
        return {"id": i, "kind": "circle", "args": [step.center, step.through]}
    if isinstance(step, LineDef):
        return {"id": i, "kind": "line", "args": [step.p, step.q]}
    if isinstance(step, IntersectBasic):
        return {"id": i, "kind": "intersect", "args": [step.a, step.b], "hint": _hint(step.pick)}
    if isinstance(step, ConicIntersect):
        return {
            "id": i,
            "kind": "conic_intersect",
            "args": [step.circle],
            "conic": _conic_ref(step.conic),
            "hint": _hint(step.pick),
        }
    raise MalformedProgram(f"cannot serialize step {i}: {step!r}")


def to_dict(p: ConstructionProgram) -> dict:
    m = p.metadata
    return {
        "version": VERSION,
        "mode": p.mode,
        "fixed_conic": [str(Fraction(c)) for c in p.fixed_conic.coeffs],
        "working_frame": list(p.working_frame),
        "form_parameter": p.form_parameter,
        "steps": [step_record(i, s) for i, s in enumerate(p.steps)],
        "final": p.final,
        "metadata": {
            "sqrt_count": m.sqrt_count,
            "cbrt_count": m.cbrt_count,
            "conic_depth": m.conic_depth,
            "compile_precision_bits": m.compile_precision_bits,
            "expression": m.expression,
        },
    }


def _ids(rec, n):
    args = rec.get("args")
    if not isinstance(args, list) or len(args) != n or not all(isinstance(a, int) for a in args):
        raise MalformedProgram(f"step {rec.get('id')}: expected {n} step ids, got {args!r}")
    return args


def _load_hint(rec) -> SelectorHint:
    h = rec.get("hint")
    if not isinstance(h, dict) or "x" not in h or "y" not in h:
        raise MalformedProgram(f"step {rec.get('id')}: missing hint")
    pick = SelectorHint(str(h["x"]), str(h["y"]), str(h.get("min_separation", "inf")))
    try:
        pick.point()
    except (ValueError, TypeError) as exc:
        raise MalformedProgram(f"step {rec.get('id')}: bad hint {h!r}") from exc
    return pick


def _load_conic(c):
    if c == "fixed":
        return FIXED
    if isinstance(c, dict) and c.get("form") == "central":
        return CentralRef(int(c["u"]), int(c["center"]), int(c["rhs"]))
    if isinstance(c, dict) and c.get("form") == "parabola":
        return ParabolaRef(int(c["lam"]), int(c["a"]), int(c["b"]))
    raise MalformedProgram(f"unknown conic reference {c!r}")


def load_step(rec: dict):
    kind = rec.get("kind")
    if kind == "point":
        args = rec.get("args")
        if not isinstance(args, list) or len(args) != 1:
            raise MalformedProgram(f"step {rec.get('id')}: point needs one value")
        try:
            return PointLit(GaussianRational.parse(str(args[0])))
        except ValueError as exc:
            raise MalformedProgram(str(exc)) from exc
    if kind in FIELD_OPS:
        return MacroField(kind, tuple(_ids(rec, FIELD_OPS[kind])))
    if kind == "sqrt":
        return MacroSqrt(_ids(rec, 1)[0])
    if kind == "circle":
        return CircleDef(*_ids(rec, 2))
    if kind == "line":
        return LineDef(*_ids(rec, 2))
    if kind == "intersect":
        return IntersectBasic(*_ids(rec, 2), _load_hint(rec))
    if kind == "conic_intersect":
        return ConicIntersect(_ids(rec, 1)[0], _load_conic(rec.get("conic")), _load_hint(rec))
    raise MalformedProgram(f"unknown step kind {kind!r}")


def from_dict(d: dict) -> ConstructionProgram:
    if not isinstance(d, dict):
        raise MalformedProgram("trace must be a JSON object")
    if d.get("version") != VERSION:
        raise MalformedProgram(f"unsupported trace version {d.get('version')!r}")
    try:
        coeffs = [Fraction(str(c)) for c in d["fixed_conic"]]
        if len(coeffs) != 6:
            raise MalformedProgram("fixed_conic needs six coefficients")
        steps = d["steps"]
        for i, rec in enumerate(steps):
            if rec.get("id") != i:
                raise MalformedProgram(f"step ids must be 0..n-1 in order (found {rec.get('id')!r} at {i})")
        m = d["metadata"]
        meta = Metadata(
            int(m["sqrt_count"]),
            int(m["cbrt_count"]),
            int(m["conic_depth"]),
            int(m["compile_precision_bits"]),
            m.get("expression"),
        )
        frame = tuple(str(v) for v in d["working_frame"])
        return ConstructionProgram(
            d["mode"],
            ConicImplicit(*coeffs),
            frame,
            tuple(load_step(rec) for rec in steps),
            int(d["final"]),
            d.get("form_parameter"),
            meta,
        )
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedProgram(f"malformed trace: {exc}") from exc


def dumps(p: ConstructionProgram) -> str:
    """Indented JSON with one line per step, so traces diff step by step."""
    d = to_dict(p)
    steps = d.pop("steps")
    head = json.dumps(d, indent=2)[:-2]
    body = ",\n".join("    " + json.dumps(rec) for rec in steps)
    return f'{head},\n  "steps": [\n{body}\n  ]\n}}'



def loads(text: str) -> ConstructionProgram:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedProgram(f"trace is not valid JSON: {exc}") from exc
    return from_dict(data)


def save(p: ConstructionProgram, path) -> None:
    Path(path).write_text(dumps(p) + "\n")


def load(path) -> ConstructionProgram:
    return loads(Path(path).read_text())


def report_dict(r) -> dict:
    """JSON-ready view of an executor Report."""
    prec = Precision(r.precision_used)
    return {
        "passed": r.passed,
        "constructed": {"re": decimal(r.constructed.real, prec), "im": decimal(r.constructed.imag, prec)},
        "oracle": {"re": decimal(r.oracle.real, prec), "im": decimal(r.oracle.imag, prec)},
        "abs_error": decimal(r.abs_error, prec),
        "tau": decimal(r.tau, prec),
        "max_step_residual": decimal(r.max_step_residual, prec),
        "audit": list(r.audit),
        "conic_intersections_executed": r.conic_intersections_executed,
        "conic_depth": r.conic_depth,
        "precision_used": r.precision_used,
    }

