"""Lower expressions to construction programs that use one fixed conic.

Field operations, conjugation and square roots become ruler-and-compass
macros. A cube root ``cbrt(v)`` is split into ``cbrt(|v|)`` and a trisection
of ``arg v``. Each is realized by a circle/conic gadget whose intersections
lie on ``y = x^2``:

* cube root: circle ``x^2 + y^2 - r x - y = 0`` with conic
  ``u x^2 + y^2 - r x - u y = 0`` meet where ``x^4 = r x``;
* trisection: circle ``x^2 + y^2 - (q c^3/4) x - (1 + 3c^2/4) y = 0`` with
  conic ``u x^2 + y^2 - (q c^3/4) x - (u + 3c^2/4) y = 0`` meet where
  ``x (x^3 - (3c^2/4) x - q c^3/4) = 0``, i.e. ``x = c cos(theta/3)``.

``u`` is the form parameter of the fixed conic in its regular frame (0 for a
parabola, where the gadget conic degenerates into a regular parabola). In
lemma mode the gadget conic is drawn directly. In fixed mode the circle is
pulled back by the similarity taking the fixed conic onto the gadget conic,
intersected with the fixed conic itself, and the hit is pushed forward again.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath import mpc, mpf

from .conic import (
    Central,
    Circle,
    ConicImplicit,
    Line,
    Parabola,
    RegularConic,
    classify,
    intersect_basic,
    intersect_circle_conic,
    regular_parts,
    regular_to_implicit,
    similarity_params,
)
from .errors import (
    ClassUnreachable,
    DegenerateGadget,
    DivisionByZero,
    InvalidFixedConic,
    OrientationClassMismatch,
)
from .expr import (
    Add,
    Cbrt,
    Conj,
    Div,
    Expr,
    GaussianRational,
    Lit,
    Mul,
    Neg,
    Sqrt,
    Sub,
    I,
    principal_sqrt,
    radical_counts,
    show,
)
from .numeric import Precision, decimal, to_fraction, to_mpf
from .program import (
    FIXED,
    CentralRef,
    CircleDef,
    ConicIntersect,
    ConstructionProgram,
    IntersectBasic,
    LineDef,
    MacroField,
    MacroSqrt,
    Metadata,
    ParabolaRef,
    PointLit,
    SelectorHint,
    select_nearest,
)

TRISECT_THRESHOLD = Fraction(1, 10)
SCALE_SEARCH = 200


class Node:
    """A point-valued step under construction, with its compile-time value."""

    __slots__ = ("builder", "id")

    def __init__(self, builder: "Builder", step_id: int):
        self.builder = builder
        self.id = step_id

    @property
    def value(self) -> mpc:
        return self.builder.values[self.id]

    @property
    def real(self) -> mpf:
        return self.value.real

    def __add__(self, o):
        return self.builder.field("add", self, o)

    def __radd__(self, o):
        return self.builder.field("add", o, self)

    def __sub__(self, o):
        return self.builder.field("sub", self, o)

    def __rsub__(self, o):
        return self.builder.field("sub", o, self)

    def __mul__(self, o):
        return self.builder.field("mul", self, o)

    def __rmul__(self, o):
        return self.builder.field("mul", o, self)

    def __truediv__(self, o):
        return self.builder.field("div", self, o)

    def __rtruediv__(self, o):
        return self.builder.field("div", o, self)

    def __neg__(self):
        return self.builder.field("neg", self)

    def conj(self):
        return self.builder.field("conj", self)

    def __repr__(self):
        return f"Node({self.id}, {mpmath.nstr(self.value, 8)})"


def _fold(op: str, args: list) -> GaussianRational:
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "div":
        if not args[1]:
            raise DivisionByZero("division by a zero constant")
        return args[0] / args[1]
    if op == "neg":
        return -args[0]
    return args[0].conj()


def _apply(op: str, args: list) -> mpc:
    if op == "add":
        return args[0] + args[1]
    if op == "sub":
        return args[0] - args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "div":
        if args[1] == 0:
            raise DivisionByZero("division by zero")
        return args[0] / args[1]
    if op == "neg":
        return -args[0]
    return mpmath.conj(args[0])


class Builder:
    """Append-only step list with hash-consing and constant folding."""

    def __init__(self, prec: Precision):
        self.prec = prec
        self.steps: list = []
        self.values: list = []
        self._cache: dict = {}

    def _emit(self, step, value) -> int:
        key = step
        if key in self._cache:
            return self._cache[key]
        self.steps.append(step)
        self.values.append(value)
        self._cache[key] = len(self.steps) - 1
        return len(self.steps) - 1

    def lit(self, value) -> Node:
        if not isinstance(value, GaussianRational):
            value = GaussianRational(Fraction(value))
        return Node(self, self._emit(PointLit(value), value.to_mpc()))

    def lift(self, x) -> Node:
        if isinstance(x, Node):
            return x
        if isinstance(x, (int, Fraction, GaussianRational)):
            return self.lit(x)
        raise TypeError(f"cannot lift {x!r} into a construction")

    def literal_value(self, n: Node) -> Optional[GaussianRational]:
        step = self.steps[n.id]
        return step.value if isinstance(step, PointLit) else None

    def field(self, op: str, *args) -> Node:
        nodes = [self.lift(a) for a in args]
        lits = [self.literal_value(n) for n in nodes]
        if all(v is not None for v in lits):
            return self.lit(_fold(op, lits))
        zero, one = GaussianRational(0), GaussianRational(1)
        if op == "add":
            if lits[0] == zero:
                return nodes[1]
            if lits[1] == zero:
                return nodes[0]
        elif op == "sub" and lits[1] == zero:
            return nodes[0]
        elif op == "mul":
            if lits[0] == one:
                return nodes[1]
            if lits[1] == one:
                return nodes[0]
            if zero in (lits[0], lits[1]):
                return self.lit(0)
        elif op == "div":
            if lits[1] == zero:
                raise DivisionByZero("division by a zero constant")
            if lits[1] == one:
                return nodes[0]
        value = _apply(op, [n.value for n in nodes])
        return Node(self, self._emit(MacroField(op, tuple(n.id for n in nodes)), value))

    def sqrt(self, x) -> Node:
        n = self.lift(x)
        lit = self.literal_value(n)
        if lit is not None and lit.im == 0 and lit.re >= 0:
            root = _rational_sqrt(lit.re)
            if root is not None:
                return self.lit(root)
        return Node(self, self._emit(MacroSqrt(n.id), principal_sqrt(n.value)))

    def circle(self, center: Node, through: Node) -> int:
        c = Circle(_xy(center.value), _xy(through.value))
        return self._emit(CircleDef(center.id, through.id), c)

    def line(self, p: Node, q: Node) -> int:
        return self._emit(LineDef(p.id, q.id), Line(_xy(p.value), _xy(q.value)))

    def meet(self, a: int, b: int, expected: mpc) -> Node:
        hits = intersect_basic(self.values[a], self.values[b], self.prec)
        cands = [mpc(h.x, h.y) for h in hits]
        return self._select(cands, expected, lambda pick: IntersectBasic(a, b, pick))

    def conic_meet(self, circle: int, ref, conic: ConicImplicit, expected: mpc) -> Node:
        hits = intersect_circle_conic(self.values[circle], conic, self.prec)
        cands = [mpc(h.x, h.y) for h in hits]
        return self._select(cands, expected, lambda pick: ConicIntersect(circle, ref, pick))

    def _select(self, cands, expected, make) -> Node:
        chosen, separation = select_nearest(cands, expected, self.prec.tau)
        pick = SelectorHint(
            decimal(chosen.real, self.prec),
            decimal(chosen.imag, self.prec),
            "inf" if separation == mpf("inf") else decimal(separation, self.prec),
        )
        return Node(self, self._emit(make(pick), chosen))

    def x_coordinate(self, z: Node) -> Node:
        """Foot of the vertical through z on the real axis (two ruler lines)."""
        if self.literal_value(z) is not None:
            return self.lit(self.literal_value(z).re)
        axis = self.line(self.lit(0), self.lit(1))
        vertical = self.line(z, z + self.lit(I))
        return self.meet(axis, vertical, mpc(z.value.real, 0))


def _xy(z: mpc) -> tuple:
    z = mpc(z)
    return (z.real, z.imag)


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    from math import isqrt

    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# --- gadgets ---------------------------------------------------------------

@dataclass
class Gadget:
    """Circle (center, through) and regular conic meeting at ``expected``."""

    center: Node
    through: Node
    conic: RegularConic
    expected: mpc
    scale: Fraction


def _central_or_parabola(b: Builder, u: Optional[Node], lin: Node, quad_y: Node, make_parabola) -> RegularConic:
    """Regular form of u x^2 + y^2 - lin x - quad_y y = 0."""
    if u is None:
        return make_parabola()
    center = (lin / (2 * u), quad_y / 2)
    rhs = lin * lin / (4 * u) + quad_y * quad_y / 4
    if abs(rhs.real) <= b.prec.tau * max(1, abs(u.real)):
        raise DegenerateGadget("gadget conic degenerates into a line pair")
    return Central(u, center, rhs)


def gadget_cbrt(b: Builder, r: Node, u: Optional[Node], n: Fraction = Fraction(1)) -> Gadget:
    """Gadget whose chosen hit is (cbrt(n^3 r), cbrt(n^3 r)^2)."""
    rp = r * (n ** 3)
    center = rp / 2 + b.lit(GaussianRational(0, Fraction(1, 2)))
    conic = _central_or_parabola(b, u, rp, u, lambda: Parabola(1 / rp, b.lit(0), b.lit(0)))
    x = mpmath.cbrt(rp.real)
    return Gadget(center, b.lit(0), conic, mpc(x, x * x), n)


def gadget_trisect(b: Builder, q: Node, u: Optional[Node], c: Fraction = Fraction(1)) -> Gadget:
    """Gadget whose chosen hit has x = c cos(acos(q)/3), the largest cubic root."""
    lin = q * (c ** 3 / 4)
    quad = 1 + 3 * c * c / 4
    center = lin / 2 + b.lit(GaussianRational(0, quad / 2))
    if u is None:
        qp = 3 * c * c / 4
        conic = Parabola(1 / lin, b.lit(qp / 2), -(qp * qp) / (4 * lin))
    else:
        conic = _central_or_parabola(b, u, lin, u + (quad - 1), None)
    x = c * mpmath.cos(mpmath.acos(q.real) / 3)
    return Gadget(center, b.lit(0), conic, mpc(x, x * x), c)


def _cbrt_rhs(u, rp):
    return rp * rp / (4 * u) + u * u / 4


def _trisect_terms(u, q, c):
    lin = q * c ** 3 / 4
    quad = u + 3 * c * c / 4
    return lin * lin / (4 * u), quad * quad / 4


def _class_ok(neg_part, pos_part, sign) -> bool:
    """neg_part < 0 <= pos_part; require a 2x margin on the winning side."""
    if sign > 0:
        return pos_part >= 2 * abs(neg_part) and pos_part > 0
    return abs(neg_part) >= 2 * pos_part and neg_part < 0


def choose_gadget_scale(u, magnitude, required_class_sign: int = 1, gadget: str = "cbrt") -> Fraction:
    """Rational gadget scale giving the required orientation class.

    ``u`` is the fixed conic's form parameter (None for a parabola);
    ``magnitude`` is the radicand r (cbrt) or the cosine q (trisect).
    """
    u = None if u is None else to_mpf(u)
    magnitude = to_mpf(magnitude)
    if u is not None and u > 0 and required_class_sign < 0:
        raise ClassUnreachable("an ellipse-type gadget always has positive class")
    if gadget == "cbrt":
        if magnitude <= 0:
            raise ValueError("cube-root gadget needs a positive radicand")
        k0 = int(mpmath.ceil(-mpmath.log(magnitude, 2) / 3))
        for step in range(2 * SCALE_SEARCH + 1):
            k = k0 + (step + 1) // 2 * (1 if step % 2 else -1)
            n = Fraction(2) ** k
            if u is None or u > 0:
                return n
            rp = mpf(n.numerator ** 3) / n.denominator ** 3 * magnitude
            if _class_ok(rp * rp / (4 * u), u * u / 4, required_class_sign):
                return n
        raise ClassUnreachable(f"no cube-root scale reaches class {required_class_sign}")
    if u is None or u > 0:
        return Fraction(1)
    for c in _trisect_candidates():
        cm = mpf(c.numerator) / c.denominator
        neg, pos = _trisect_terms(u, magnitude, cm)
        if _class_ok(neg, pos, required_class_sign):
            return c
    raise ClassUnreachable(f"no trisection scale reaches class {required_class_sign}")


def _trisect_candidates() -> list[Fraction]:
    cands = {Fraction(m, 8) for m in range(1, 129)}
    cands |= {Fraction(2) ** k for k in range(-12, 25)}
    return sorted(cands, key=lambda c: (abs(mpmath.log(mpf(c.numerator) / c.denominator)), c))


# --- compilation -----------------------------------------------------------

def reduce_to_fixed(gadget_conic: RegularConic, fixed_regular: RegularConic, sqrt) -> tuple:
    """(s, tx, ty) of the similarity taking the fixed conic onto the gadget conic."""
    if isinstance(gadget_conic, Central) != isinstance(fixed_regular, Central):
        raise OrientationClassMismatch("gadget and fixed conic have different variants")
    if isinstance(gadget_conic, Central) and (gadget_conic.rhs.real > 0) != (_real(fixed_regular.rhs) > 0):
        raise OrientationClassMismatch("gadget conic class does not match the fixed conic")
    return similarity_params(gadget_conic, fixed_regular, sqrt)


def _real(x) -> mpf:
    return x.real if isinstance(x, Node) else to_mpf(x)


class _Compiler:
    def __init__(self, fixed: ConicImplicit, mode: str, prec: Precision):
        self.fixed = fixed
        self.mode = mode
        self.prec = prec
        self.b = Builder(prec)
        self.memo: dict = {}
        self._parts = None

    # the fixed conic's regular frame, built lazily as macro steps
    @property
    def parts(self):
        if self._parts is None:
            nodes = [self.b.lit(q) for q in self.fixed.coeffs]
            self._parts = regular_parts(nodes, self.b.sqrt, lambda n: n.real, self.prec.tau, self.b.lit)
        return self._parts

    @property
    def u(self) -> Optional[Node]:
        conic = self.parts.conic
        return conic.u if isinstance(conic, Central) else None

    @property
    def class_sign(self) -> int:
        conic = self.parts.conic
        return conic.class_sign if isinstance(conic, Central) else 1

    @property
    def omega(self) -> Node:
        frame = self.parts.frame
        return self.b.lift(frame.cos) + self.b.lit(I) * self.b.lift(frame.sin)

    def lower(self, e: Expr) -> tuple[Node, int]:
        if e in self.memo:
            return self.memo[e]
        b = self.b
        if isinstance(e, Lit):
            out = (b.lit(e.value), 0)
        elif isinstance(e, (Add, Sub, Mul, Div)):
            (l, dl), (r, dr) = self.lower(e.left), self.lower(e.right)
            op = {Add: "add", Sub: "sub", Mul: "mul", Div: "div"}[type(e)]
            out = (b.field(op, l, r), max(dl, dr))
        elif isinstance(e, (Neg, Conj)):
            x, d = self.lower(e.arg)
            out = (b.field("neg" if isinstance(e, Neg) else "conj", x), d)
        elif isinstance(e, Sqrt):
            x, d = self.lower(e.arg)
            out = (b.sqrt(x), d)
        elif isinstance(e, Cbrt):
            x, d = self.lower(e.arg)
            node, used_conic = self.cbrt(x)
            out = (node, d + 1 if used_conic else d)
        else:
            raise TypeError(f"not an expression: {e!r}")
        self.memo[e] = out
        return out

    def realize(self, g: Gadget) -> Node:
        """Emit the gadget's conic step and return the x-coordinate of its hit."""
        b = self.b
        if self.mode == "lemma":
            circle = b.circle(g.center, g.through)
            if isinstance(g.conic, Central):
                alpha, beta = g.conic.center
                ref = CentralRef(g.conic.u.id, (alpha + b.lit(I) * beta).id, g.conic.rhs.id)
            else:
                ref = ParabolaRef(g.conic.lam.id, g.conic.a.id, g.conic.b.id)
            hit = b.conic_meet(circle, ref, _numeric_implicit(g.conic), g.expected)
            return b.x_coordinate(hit)
        s, tx, ty = reduce_to_fixed(g.conic, self.parts.conic, b.sqrt)
        t = tx + b.lit(I) * ty
        omega = self.omega
        center = omega * (g.center - t) / s
        through = omega * (g.through - t) / s
        circle = b.circle(center, through)
        expected = omega.value * (g.expected - t.value) / s.value
        w = b.conic_meet(circle, FIXED, self.fixed, expected)
        z = s * (omega.conj() * w) + t
        return b.x_coordinate(z)

    def cbrt_positive(self, r: Node) -> Node:
        n = choose_gadget_scale(_real(self.u) if self.u is not None else None, r.real, self.class_sign, "cbrt")
        g = gadget_cbrt(self.b, r, self.u, n)
        return self.realize(g) / n

    def trisect(self, q: Node) -> Node:
        """cos(acos(q)/3) for q >= 1/10."""
        c = choose_gadget_scale(_real(self.u) if self.u is not None else None, q.real, self.class_sign, "trisect")
        g = gadget_trisect(self.b, q, self.u, c)
        return self.realize(g) / c

    def third_angle(self, q: Node, abs_sin: Node) -> tuple[Node, Node]:
        """cos and sin of theta/3 for theta in [0, pi] with cos theta = q."""
        b = self.b
        qv = q.real
        threshold = mpf(TRISECT_THRESHOLD.numerator) / TRISECT_THRESHOLD.denominator
        if qv >= threshold:
            t = self.trisect(q)
            return t, abs_sin / (4 * t * t - 1)
        half_sqrt3 = b.sqrt(3) / 2
        if qv <= -threshold:
            # theta/3 = pi/3 - psi/3 with cos psi = -q
            t2 = self.trisect(-q)
            s2 = abs_sin / (4 * t2 * t2 - 1)
            return t2 / 2 + half_sqrt3 * s2, half_sqrt3 * t2 - s2 / 2
        # theta/3 = pi/6 - psi/3 with cos psi = sin theta, sin psi = q
        t1 = self.trisect(abs_sin)
        s1 = q / (4 * t1 * t1 - 1)
        return half_sqrt3 * t1 + s1 / 2, t1 / 2 - half_sqrt3 * s1

    def cbrt(self, v: Node) -> tuple[Node, bool]:
        b = self.b
        value = v.value
        bits = self.prec.bits
        if abs(value) <= mpf(2) ** (-bits):
            return b.lit(0), False
        r = b.sqrt(v * v.conj())
        root_r = self.cbrt_positive(r)
        noise = mpf(2) ** (8 - bits) * abs(value)
        if abs(value.imag) <= noise:
            if value.real > 0:
                return root_r, True
            half_sqrt3 = b.sqrt(3) / 2
            return root_r * (Fraction(1, 2) + b.lit(I) * half_sqrt3), True
        q = (v + v.conj()) / (2 * r)
        sin_theta = (v - v.conj()) / (b.lit(GaussianRational(0, 2)) * r)
        sign = 1 if value.imag > 0 else -1
        t, s_abs = self.third_angle(q, sin_theta if sign > 0 else -sin_theta)
        s = s_abs if sign > 0 else -s_abs
        return root_r * (t + b.lit(I) * s), True


def _numeric_implicit(conic: RegularConic) -> ConicImplicit:
    if isinstance(conic, Central):
        alpha, beta = conic.center
        return regular_to_implicit(Central(conic.u.real, (alpha.real, beta.real), conic.rhs.real))
    return regular_to_implicit(Parabola(conic.lam.real, conic.a.real, conic.b.real))


def compile(e: Expr, fixed_conic: ConicImplicit, mode: str = "fixed", prec: Precision = Precision()) -> ConstructionProgram:  # noqa: A001
    """Lower ``e`` to a program whose conic steps use ``fixed_conic`` only."""
    _check_mode(mode)
    _check_fixed(fixed_conic, prec)
    with prec.context():
        comp = _Compiler(_exact_conic(fixed_conic), mode, prec)
        final, depth = comp.lower(e)
        return _assemble(comp, final, depth, e)


def trisection_expr(q: Fraction) -> Expr:
    """cos(acos(q)/3) written with cube roots: the real part of cbrt(q + i sqrt(1 - q^2))."""
    root = Cbrt(Add(Lit(GaussianRational(q)), Mul(Lit(I), Sqrt(Lit(GaussianRational(1 - q * q))))))
    return Div(Add(root, Conj(root)), Lit(GaussianRational(2)))


def compile_trisection(q, fixed_conic: ConicImplicit, mode: str = "fixed", prec: Precision = Precision()) -> ConstructionProgram:
    """Program for cos(acos(q)/3) built from the trisection gadget alone.

    ``q`` is a rational cosine in [-1, 1]; the recorded expression is
    :func:`trisection_expr`, so verification uses the cube-root oracle.
    """
    q = Fraction(q)
    if not -1 <= q <= 1:
        raise ValueError(f"cosine must lie in [-1, 1], got {q}")
    _check_mode(mode)
    _check_fixed(fixed_conic, prec)
    e = trisection_expr(q)
    with prec.context():
        comp = _Compiler(_exact_conic(fixed_conic), mode, prec)
        b = comp.b
        cos_third, _ = comp.third_angle(b.lit(q), b.sqrt(1 - q * q))
        return _assemble(comp, cos_third, 1, e)


def _check_mode(mode: str) -> None:
    if mode not in ("fixed", "lemma"):
        raise ValueError(f"mode must be 'fixed' or 'lemma', got {mode!r}")


def _check_fixed(fixed_conic: ConicImplicit, prec: Precision) -> None:
    kind = classify(fixed_conic, prec)
    if not kind.proper:
        raise InvalidFixedConic(f"fixed conic must be a non-degenerate non-circle conic, got {kind.value}")


def _exact_conic(k: ConicImplicit) -> ConicImplicit:
    return ConicImplicit(*(to_fraction(v) for v in k.coeffs))


def _assemble(comp: "_Compiler", final: Node, depth: int, e: Expr) -> ConstructionProgram:
    prec, b = comp.prec, comp.b
    form_parameter = None
    frame = (decimal(1, prec), decimal(0, prec))
    if comp._parts is not None:
        parts = comp.parts
        frame = (decimal(_real(parts.frame.cos), prec), decimal(_real(parts.frame.sin), prec))
        if comp.u is not None:
            form_parameter = comp.u.id
    sq, cb = radical_counts(e)
    meta = Metadata(sq, cb, depth, prec.bits, show(e))
    return ConstructionProgram(comp.mode, comp.fixed, frame, tuple(b.steps), final.id, form_parameter, meta)
