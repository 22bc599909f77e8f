"""Run, audit and verify construction programs."""
from __future__ import annotations

from dataclasses import dataclass, field

from mpmath import mpc, mpf

from . import expr as expr_mod
from .conic import (
    Central,
    Circle,
    ConicImplicit,
    Line,
    Parabola,
    classify,
    intersect_basic,
    intersect_circle_conic,
    regular_to_implicit,
)
from .errors import MalformedProgram
from .expr import Expr, principal_sqrt
from .numeric import Precision
from .planner import _apply, compile as compile_program
from .program import (
    FIELD_OPS,
    FIXED,
    POINT_STEPS,
    CentralRef,
    CircleDef,
    ConicIntersect,
    ConstructionProgram,
    FixedRef,
    IntersectBasic,
    LineDef,
    MacroField,
    MacroSqrt,
    ParabolaRef,
    PointLit,
    select_nearest,
)


@dataclass
class Valuation:
    values: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    conics: dict = field(default_factory=dict)

    def __getitem__(self, step_id: int):
        return self.values[step_id]


def _xy(z) -> tuple:
    return (z.real, z.imag)


def lemma_conic(ref, values) -> ConicImplicit:
    """Implicit form of a regular conic whose parameters are step values."""
    if isinstance(ref, CentralRef):
        center = values[ref.center]
        regular = Central(values[ref.u].real, (center.real, center.imag), values[ref.rhs].real)
    else:
        regular = Parabola(values[ref.lam].real, values[ref.a].real, values[ref.b].real)
    return regular_to_implicit(regular)


def execute(p: ConstructionProgram, prec: Precision = Precision()) -> Valuation:
    """Evaluate every step; intersections are recomputed geometrically."""
    out = Valuation()
    vals = out.values
    with prec.context():
        tau = prec.tau
        fixed = ConicImplicit(*p.fixed_conic.mp())
        for i, step in enumerate(p.steps):
            if isinstance(step, PointLit):
                vals[i] = step.value.to_mpc()
            elif isinstance(step, MacroField):
                vals[i] = _apply(step.op, [vals[a] for a in step.args])
            elif isinstance(step, MacroSqrt):
                vals[i] = principal_sqrt(vals[step.arg])
            elif isinstance(step, CircleDef):
                vals[i] = Circle(_xy(vals[step.center]), _xy(vals[step.through]))
            elif isinstance(step, LineDef):
                vals[i] = Line(_xy(vals[step.p]), _xy(vals[step.q]))
            elif isinstance(step, IntersectBasic):
                a, b = vals[step.a], vals[step.b]
                hits = intersect_basic(a, b, prec)
                chosen, _ = select_nearest([mpc(h.x, h.y) for h in hits], step.pick.point(), tau)
                vals[i] = chosen
                out.residuals[i] = max(a.implicit().residual(_xy(chosen)), b.implicit().residual(_xy(chosen)))
            elif isinstance(step, ConicIntersect):
                circle = vals[step.circle]
                conic = fixed if isinstance(step.conic, FixedRef) else lemma_conic(step.conic, vals)
                hits = intersect_circle_conic(circle, conic, prec)
                chosen, _ = select_nearest([mpc(h.x, h.y) for h in hits], step.pick.point(), tau)
                vals[i] = chosen
                out.conics[i] = conic
                out.residuals[i] = max(circle.implicit().residual(_xy(chosen)), conic.residual(_xy(chosen)))
            else:
                raise MalformedProgram(f"unknown step kind at {i}: {step!r}")
    return out


def audit(p: ConstructionProgram) -> list[str]:
    """Legality violations; an empty list means the program passes."""
    v: list[str] = []
    steps = p.steps

    def point_ref(i, j, what):
        if not isinstance(j, int) or not 0 <= j < i:
            v.append(f"step {i}: {what} references invalid or later step {j}")
            return False
        if not isinstance(steps[j], POINT_STEPS):
            v.append(f"step {i}: {what} step {j} is not a point")
            return False
        return True

    def distinct(i, a, b, what):
        if a == b:
            v.append(f"step {i}: {what} uses the same point twice")
        elif isinstance(steps[a], PointLit) and isinstance(steps[b], PointLit) and steps[a].value == steps[b].value:
            v.append(f"step {i}: {what} uses two equal points")

    def curve_ref(i, j, kinds, what):
        if not isinstance(j, int) or not 0 <= j < i or not isinstance(steps[j], kinds):
            v.append(f"step {i}: {what} must reference an earlier {'/'.join(k.__name__ for k in kinds)}")
            return False
        return True

    kind = classify(p.fixed_conic, Precision(p.metadata.compile_precision_bits))
    if not kind.proper:
        v.append(f"fixed conic is {kind.value}, not a non-degenerate non-circle conic")
    if p.mode not in ("fixed", "lemma"):
        v.append(f"unknown mode {p.mode!r}")
    for i, s in enumerate(steps):
        if isinstance(s, PointLit):
            continue
        if isinstance(s, MacroField):
            if FIELD_OPS.get(s.op) != len(s.args):
                v.append(f"step {i}: bad macro {s.op}/{len(s.args)}")
            for a in s.args:
                point_ref(i, a, "macro argument")
        elif isinstance(s, MacroSqrt):
            point_ref(i, s.arg, "sqrt argument")
        elif isinstance(s, CircleDef):
            if point_ref(i, s.center, "circle center") and point_ref(i, s.through, "circle point"):
                distinct(i, s.center, s.through, "circle")
        elif isinstance(s, LineDef):
            if point_ref(i, s.p, "line point") and point_ref(i, s.q, "line point"):
                distinct(i, s.p, s.q, "line")
        elif isinstance(s, IntersectBasic):
            ok = curve_ref(i, s.a, (LineDef, CircleDef), "intersection")
            ok = curve_ref(i, s.b, (LineDef, CircleDef), "intersection") and ok
            if ok and s.a == s.b:
                v.append(f"step {i}: intersects a curve with itself")
        elif isinstance(s, ConicIntersect):
            if not curve_ref(i, s.circle, (CircleDef,), "conic intersection"):
                v.append(f"step {i}: conic-conic intersection is not allowed")
            _audit_conic_ref(p, i, s.conic, v, point_ref)
        else:
            v.append(f"step {i}: unknown step kind {type(s).__name__}")
    if not isinstance(p.final, int) or not 0 <= p.final < len(steps) or not isinstance(steps[p.final], POINT_STEPS):
        v.append(f"final {p.final} is not a point step")
    return v


def _audit_conic_ref(p, i, ref, v, point_ref):
    if p.mode == "fixed":
        if ref is not FIXED:
            v.append(f"non-fixed conic at step {i}")
        return
    if isinstance(ref, FixedRef):
        return
    if isinstance(ref, CentralRef):
        if p.form_parameter is None:
            v.append(f"step {i}: central conic but the session conic is a parabola")
        elif ref.u != p.form_parameter:
            v.append(f"step {i}: conic form parameter is step {ref.u}, session uses step {p.form_parameter}")
        for j in (ref.u, ref.center, ref.rhs):
            point_ref(i, j, "conic parameter")
    elif isinstance(ref, ParabolaRef):
        if p.form_parameter is not None:
            v.append(f"step {i}: parabola but the session conic is central")
        for j in (ref.lam, ref.a, ref.b):
            point_ref(i, j, "conic parameter")
    else:
        v.append(f"step {i}: unknown conic reference {ref!r}")


@dataclass(frozen=True)
class Report:
    constructed: mpc
    oracle: mpc
    abs_error: mpf
    max_step_residual: mpf
    audit: tuple
    conic_intersections_executed: int
    conic_depth: int
    precision_used: int

    @property
    def tau(self) -> mpf:
        return Precision(self.precision_used).tau

    @property
    def passed(self) -> bool:
        return not self.audit and self.abs_error <= self.tau


def report_for(p: ConstructionProgram, oracle: mpc, prec: Precision) -> Report:
    val = execute(p, prec)
    violations = tuple(audit(p))
    with prec.context():
        constructed = val[p.final]
        residual = max(val.residuals.values(), default=mpf(0))
        return Report(
            constructed=constructed,
            oracle=oracle,
            abs_error=abs(constructed - oracle),
            max_step_residual=residual,
            audit=violations,
            conic_intersections_executed=len(val.conics),
            conic_depth=p.metadata.conic_depth,
            precision_used=prec.bits,
        )


def verify(e: Expr, conic: ConicImplicit, mode: str = "fixed", prec: Precision = Precision()) -> Report:
    """Compile, execute and compare with the direct evaluation of ``e``."""
    program = compile_program(e, conic, mode, prec)
    return report_for(program, expr_mod.eval(e, prec), prec)
