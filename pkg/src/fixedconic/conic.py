"""Conic geometry: classification, regular forms, similarities, intersections.

Points are ``(x, y)`` tuples of mpf. Implicit conics are the six coefficients
of ``a x^2 + b xy + c y^2 + d x + e y + f = 0``; they may be exact
(:class:`~fractions.Fraction`) or mpf, and every routine accepts either.

The *regular frame* of a conic is the rotation ``world = R(theta) * frame``
that removes the xy term, plus a quarter turn where needed so that a central
conic reads ``u (x-alpha)^2 + (y-beta)^2 = rhs`` with ``u < 1`` for ellipses,
and a parabola reads ``x = lam (y-a)^2 + b``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Union

import mpmath
from mpmath import mpc, mpf

from .errors import (
    CircleHasNoDirectrix,
    CoincidentObjects,
    DegenerateInput,
    EliminationDegenerate,
    FormParameterMismatch,
    NotAConic,
    OrientationClassMismatch,
)
from .numeric import Poly, Precision, Scalar, poly_roots, to_mpf

Point = tuple


def _exact(*vals) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in vals)


def _uniform(*vals):
    """Coerce to Fractions when every value is exact, else to mpf."""
    if _exact(*vals):
        return tuple(Fraction(v) for v in vals)
    return tuple(to_mpf(v) for v in vals)


# --- implicit conics -------------------------------------------------------

@dataclass(frozen=True)
class ConicImplicit:
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    e: Scalar
    f: Scalar

    @classmethod
    def of(cls, coeffs) -> "ConicImplicit":
        return cls(*coeffs)

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d, self.e, self.f)

    def mp(self) -> tuple:
        return tuple(to_mpf(v) for v in self.coeffs)

    def is_exact(self) -> bool:
        return _exact(*self.coeffs)

    def __call__(self, x, y):
        a, b, c, d, e, f = self.mp()
        return a * x * x + b * x * y + c * y * y + d * x + e * y + f

    def scale(self) -> mpf:
        return max(abs(v) for v in self.mp())

    def residual(self, p: Point) -> mpf:
        """|F(p)| relative to the coefficient scale and the size of p."""
        x, y = p
        size = max(mpf(1), abs(x), abs(y))
        return abs(self(x, y)) / (self.scale() * size * size)

    def normalized(self) -> "ConicImplicit":
        s = self.scale()
        return ConicImplicit(*(v / s for v in self.mp()))

    def proportional_to(self, other: "ConicImplicit", tol) -> bool:
        """Scale-equivalence test used by round-trip checks."""
        u = self.normalized().mp()
        v = other.normalized().mp()
        i = max(range(6), key=lambda j: abs(u[j]))
        sign = 1 if (u[i] > 0) == (v[i] > 0) else -1
        return all(abs(x - sign * y) <= tol for x, y in zip(u, v))


def _substitute(coeffs, p, q, r, u, v, w):
    """Coefficients after substituting x -> p x + q y + r, y -> u x + v y + w."""
    a, b, c, d, e, f = coeffs
    return (
        a * p * p + b * p * u + c * u * u,
        2 * a * p * q + b * (p * v + q * u) + 2 * c * u * v,
        a * q * q + b * q * v + c * v * v,
        2 * a * p * r + b * (p * w + r * u) + 2 * c * u * w + d * p + e * u,
        2 * a * q * r + b * (q * w + r * v) + 2 * c * v * w + d * q + e * v,
        a * r * r + b * r * w + c * w * w + d * r + e * w + f,
    )


class ConicClass(enum.Enum):
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    PARABOLA = "parabola"
    HYPERBOLA = "hyperbola"
    DEGENERATE_LINES = "degenerate lines"
    DEGENERATE_POINT = "degenerate point"
    EMPTY = "empty"

    @property
    def proper(self) -> bool:
        return self in (ConicClass.ELLIPSE, ConicClass.PARABOLA, ConicClass.HYPERBOLA)


def classify(k: ConicImplicit, prec: Precision = Precision()) -> ConicClass:
    with prec.context():
        tol = prec.tau
        if max(abs(v) for v in k.mp()) == 0:
            return ConicClass.EMPTY
        a, b, c, d, e, f = k.normalized().mp()
        if max(abs(a), abs(b), abs(c)) <= tol:
            return ConicClass.DEGENERATE_LINES
        det = mpmath.matrix([[a, b / 2, d / 2], [b / 2, c, e / 2], [d / 2, e / 2, f]])
        det = mpmath.det(det)
        disc = b * b - 4 * a * c
        if abs(det) <= tol:
            if disc < -tol:
                return ConicClass.DEGENERATE_POINT
            if disc > tol:
                return ConicClass.DEGENERATE_LINES
            # rank-one quadratic part: lam * w^2 + delta * w + f with w along n
            n = (a, b / 2) if abs(a) >= abs(c) else (b / 2, c)
            norm = mpmath.sqrt(n[0] ** 2 + n[1] ** 2)
            n = (n[0] / norm, n[1] / norm)
            lam = a + c
            delta = d * n[0] + e * n[1]
            if delta * delta - 4 * lam * f < -tol:
                return ConicClass.EMPTY
            return ConicClass.DEGENERATE_LINES
        if disc < -tol:
            if (a + c) * det > 0:
                return ConicClass.EMPTY
            if abs(b) <= tol and abs(a - c) <= tol:
                return ConicClass.CIRCLE
            return ConicClass.ELLIPSE
        if disc > tol:
            return ConicClass.HYPERBOLA
        return ConicClass.PARABOLA


# --- regular forms ---------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Rotation taking regular-frame coordinates to world coordinates."""

    cos: Any = 1
    sin: Any = 0

    def to_world(self, p: Point) -> Point:
        x, y = p
        return (self.cos * x - self.sin * y, self.sin * x + self.cos * y)

    def to_frame(self, p: Point) -> Point:
        x, y = p
        return (self.cos * x + self.sin * y, -self.sin * x + self.cos * y)

    def is_identity(self) -> bool:
        return self.cos == 1 and self.sin == 0


IDENTITY = Frame()


@dataclass(frozen=True)
class Central:
    """u (x - alpha)^2 + (y - beta)^2 = rhs, u != 0, u != 1, rhs != 0."""

    u: Any
    center: tuple
    rhs: Any

    @property
    def class_sign(self) -> int:
        return 1 if self.rhs.real > 0 else -1


@dataclass(frozen=True)
class Parabola:
    """x = lam (y - a)^2 + b, lam != 0."""

    lam: Any
    a: Any
    b: Any

    @property
    def vertex(self) -> tuple:
        return (self.b, self.a)


RegularConic = Union[Central, Parabola]


@dataclass
class RegularParts:
    frame: Frame
    conic: RegularConic
    quarter_turn: bool


def regular_parts(coeffs, sqrt: Callable, value: Callable, tol, const: Callable = None) -> RegularParts:
    """Rotate a proper non-circular conic into its regular frame.

    Works on any scalar type closed under ``+ - * /`` (with ints) and ``sqrt``;
    ``value`` maps a scalar to an mpf for branch decisions and ``const`` lifts
    a rational into the scalar type (default: mpf). The planner runs
    this on construction nodes so that the frame and regular parameters are
    themselves ruler-and-compass constructions from the coefficients.
    """
    const = const or to_mpf
    a, b, c, d, e, f = coeffs
    va, vb, vc = value(a), value(b), value(c)
    scale = max(abs(value(x)) for x in coeffs)
    if abs(vb) <= tol * scale:
        cs, sn = const(1), const(0)
        A, C, D, E = a, c, d, e
    else:
        diff = a - c
        if abs(va - vc) <= tol * scale:
            cos2, sin2 = const(0), const(1)
        else:
            h = sqrt(diff * diff + b * b)
            if va - vc < 0:
                cos2, sin2 = -diff / h, -b / h
            else:
                cos2, sin2 = diff / h, b / h
        cs = sqrt((cos2 + const(1)) / const(2))
        sn = sin2 / (2 * cs)
        A = a * cs * cs + b * cs * sn + c * sn * sn
        C = a * sn * sn - b * cs * sn + c * cs * cs
        D = d * cs + e * sn
        E = -d * sn + e * cs
    F = f
    disc = vb * vb - 4 * va * vc
    parabola = abs(disc) <= tol * scale * scale
    vA, vC = value(A), value(C)
    if parabola:
        turn = abs(vA) > abs(vC)
    else:
        turn = 0 < vA / vC and vA / vC > 1
    if turn:
        A, C, D, E = C, A, E, -D
        cs, sn = -sn, cs
    frame = Frame(cs, sn)
    if parabola:
        lam = -C / D
        pa = -E / (2 * C)
        pb = -F / D - lam * pa * pa
        return RegularParts(frame, Parabola(lam, pa, pb), turn)
    u = A / C
    alpha = -D / (2 * A)
    beta = -E / (2 * C)
    rhs = u * alpha * alpha + beta * beta - F / C
    return RegularParts(frame, Central(u, (alpha, beta), rhs), turn)


def to_regular(k: ConicImplicit, prec: Precision = Precision()) -> tuple[Frame, RegularConic]:
    kind = classify(k, prec)
    if not kind.proper:
        raise NotAConic(f"conic is {kind.value}")
    with prec.context():
        parts = regular_parts(k.mp(), mpmath.sqrt, lambda v: v, prec.tau)
        return parts.frame, parts.conic


def regular_to_implicit(r: RegularConic, frame: Frame = IDENTITY) -> ConicImplicit:
    if isinstance(r, Central):
        u, al, be, rhs = _uniform(r.u, *r.center, r.rhs)
        coeffs = (u, 0, 1, -2 * u * al, -2 * be, u * al * al + be * be - rhs)
    else:
        lam, pa, pb = _uniform(r.lam, r.a, r.b)
        coeffs = (0, 0, lam, -1, -2 * lam * pa, lam * pa * pa + pb)
    return rotate_to_world(ConicImplicit(*coeffs), frame)


def rotate_to_world(k: ConicImplicit, frame: Frame) -> ConicImplicit:
    """Re-express a frame-coordinate conic in world coordinates."""
    if frame.is_identity():
        return k
    cs, sn = frame.cos, frame.sin
    vals = _uniform(*k.coeffs, cs, sn)
    coeffs, (cs, sn) = vals[:6], vals[6:]
    return ConicImplicit(*_substitute(coeffs, cs, sn, 0, -sn, cs, 0))


def true_eccentricity(r: RegularConic):
    if isinstance(r, Parabola):
        return mpf(1)
    u, rhs = to_mpf(r.u), to_mpf(r.rhs)
    if u > 0 and rhs > 0:
        return mpmath.sqrt(1 - u) if u < 1 else mpmath.sqrt(1 - 1 / u)
    if u < 0 and rhs < 0:
        return mpmath.sqrt(1 - u)
    if u < 0 and rhs > 0:
        return mpmath.sqrt(1 + 1 / (-u))
    raise NotAConic("regular form has no real points")


def regular_branches(r: RegularConic, params) -> list[list[Point]]:
    """Points of ``r`` (frame coordinates) for each parameter, grouped by branch."""
    if isinstance(r, Parabola):
        return [[(r.lam * t * t + r.b, r.a + t) for t in params]]
    u, rhs = r.u, r.rhs
    al, be = r.center
    if u > 0:
        ax, ay = mpmath.sqrt(rhs / u), mpmath.sqrt(rhs)
        return [[(al + ax * mpmath.cos(t), be + ay * mpmath.sin(t)) for t in params]]
    if rhs > 0:
        ay, ax = mpmath.sqrt(rhs), mpmath.sqrt(rhs / -u)
        return [[(al + ax * mpmath.sinh(t), be + sg * ay * mpmath.cosh(t)) for t in params] for sg in (1, -1)]
    ax, ay = mpmath.sqrt(rhs / u), mpmath.sqrt(-rhs)
    return [[(al + sg * ax * mpmath.cosh(t), be + ay * mpmath.sinh(t)) for t in params] for sg in (1, -1)]


# --- focus / directrix -----------------------------------------------------

@dataclass(frozen=True)
class FocusDirectrix:
    """Conic |p - focus| = ecc * dist(p, directrix); directrix is n . p = offset.

    ``normal`` need not be unit length; only its direction matters.
    """

    focus: Point
    normal: Point
    offset: Scalar
    ecc: Scalar


def focus_directrix_to_implicit(fd: FocusDirectrix) -> ConicImplicit:
    fx, fy, nx, ny, off, ecc = _uniform(*fd.focus, *fd.normal, fd.offset, fd.ecc)
    if ecc <= 0:
        raise DegenerateInput("eccentricity must be positive")
    n2 = nx * nx + ny * ny
    if n2 == 0:
        raise DegenerateInput("directrix normal is zero")
    signed = nx * fx + ny * fy - off
    if abs(to_mpf(signed)) <= mpmath.sqrt(to_mpf(n2)) * mpf(2) ** (-(mpmath.mp.prec // 2)):
        raise DegenerateInput("focus lies on the directrix")
    e2 = ecc * ecc
    return ConicImplicit(
        n2 - e2 * nx * nx,
        -2 * e2 * nx * ny,
        n2 - e2 * ny * ny,
        -2 * n2 * fx + 2 * e2 * off * nx,
        -2 * n2 * fy + 2 * e2 * off * ny,
        n2 * (fx * fx + fy * fy) - e2 * off * off,
    )


def implicit_to_focus_directrix(k: ConicImplicit, prec: Precision = Precision()) -> list[FocusDirectrix]:
    kind = classify(k, prec)
    if kind is ConicClass.CIRCLE:
        raise CircleHasNoDirectrix("a circle has no directrix")
    if not kind.proper:
        raise NotAConic(f"conic is {kind.value}")
    frame, r = to_regular(k, prec)
    with prec.context():
        local = []
        if isinstance(r, Parabola):
            p = 1 / (4 * r.lam)
            local.append(((r.b + p, r.a), (mpf(1), mpf(0)), r.b - p, mpf(1)))
        else:
            ecc = true_eccentricity(r)
            al, be = r.center
            u, rhs = r.u, r.rhs
            if rhs > 0 and u > 0:
                semi = mpmath.sqrt(rhs / u)
                axis = (mpf(1), mpf(0))
            elif rhs > 0:
                semi = mpmath.sqrt(rhs)
                axis = (mpf(0), mpf(1))
            else:
                semi = mpmath.sqrt(rhs / u)
                axis = (mpf(1), mpf(0))
            for sg in (1, -1):
                focus = (al + sg * semi * ecc * axis[0], be + sg * semi * ecc * axis[1])
                offset = axis[0] * al + axis[1] * be + sg * semi / ecc
                local.append((focus, axis, offset, ecc))
        out = []
        for focus, normal, offset, ecc in local:
            out.append(FocusDirectrix(frame.to_world(focus), frame.to_world(normal), offset, ecc))
        return out


# --- similarities ----------------------------------------------------------

@dataclass(frozen=True)
class Similarity:
    """p -> s * p + t; s < 0 adds a point reflection."""

    s: Any
    t: tuple = (0, 0)

    def __call__(self, p: Point) -> Point:
        return (self.s * p[0] + self.t[0], self.s * p[1] + self.t[1])

    def inverse(self, p: Point) -> Point:
        return ((p[0] - self.t[0]) / self.s, (p[1] - self.t[1]) / self.s)


def apply_similarity(k: ConicImplicit, m: Similarity) -> ConicImplicit:
    """Image of ``k`` under ``m``, scaled by s^2 so exact inputs stay exact."""
    vals = _uniform(*k.coeffs, m.s, *m.t)
    coeffs, (s, tx, ty) = vals[:6], vals[6:]
    if s == 0:
        raise ValueError("similarity factor must be nonzero")
    out = _substitute(coeffs, 1 / s, 0, -tx / s, 0, 1 / s, -ty / s)
    return ConicImplicit(*(v * s * s for v in out))


def similarity_params(target: RegularConic, fixed: RegularConic, sqrt: Callable) -> tuple:
    """(s, tx, ty) mapping ``fixed`` onto ``target``; callers check compatibility."""
    if isinstance(target, Central):
        s = sqrt(target.rhs / fixed.rhs)
        return s, target.center[0] - s * fixed.center[0], target.center[1] - s * fixed.center[1]
    s = fixed.lam / target.lam
    return s, target.b - s * fixed.b, target.a - s * fixed.a


def similarity_between(target: RegularConic, fixed: RegularConic, prec: Precision = Precision()) -> Similarity:
    with prec.context():
        if type(target) is not type(fixed):
            raise FormParameterMismatch("a central conic is never similar to a parabola")
        if isinstance(target, Central):
            ut, uf = to_mpf(target.u), to_mpf(fixed.u)
            if abs(ut - uf) > prec.tau * max(1, abs(uf)):
                raise FormParameterMismatch(f"form parameters differ: {ut} vs {uf}")
            if target.class_sign != fixed.class_sign:
                raise OrientationClassMismatch("completed-square sides have opposite signs")
        t = _mp_regular(target)
        f = _mp_regular(fixed)
        s, tx, ty = similarity_params(t, f, mpmath.sqrt)
        return Similarity(s, (tx, ty))


def _mp_regular(r: RegularConic) -> RegularConic:
    if isinstance(r, Central):
        return Central(to_mpf(r.u), (to_mpf(r.center[0]), to_mpf(r.center[1])), to_mpf(r.rhs))
    return Parabola(to_mpf(r.lam), to_mpf(r.a), to_mpf(r.b))


# --- lines, circles, intersections -----------------------------------------

@dataclass(frozen=True)
class Line:
    p: Point
    q: Point

    def implicit(self) -> ConicImplicit:
        (x1, y1), (x2, y2) = self.p, self.q
        return ConicImplicit(0, 0, 0, y1 - y2, x2 - x1, x1 * y2 - x2 * y1)


@dataclass(frozen=True)
class Circle:
    center: Point
    through: Point

    @property
    def radius2(self):
        return (self.through[0] - self.center[0]) ** 2 + (self.through[1] - self.center[1]) ** 2

    def implicit(self) -> ConicImplicit:
        cx, cy = self.center
        return ConicImplicit(1, 0, 1, -2 * cx, -2 * cy, cx * cx + cy * cy - self.radius2)


@dataclass(frozen=True)
class Hit:
    x: mpf
    y: mpf
    multiplicity: int = 1

    @property
    def point(self) -> Point:
        return (self.x, self.y)


def _mp_point(p) -> Point:
    return (to_mpf(p[0]), to_mpf(p[1]))


def _check_object(obj, tol):
    if isinstance(obj, Line):
        line = Line(_mp_point(obj.p), _mp_point(obj.q))
        if max(abs(line.p[0] - line.q[0]), abs(line.p[1] - line.q[1])) <= tol:
            raise DegenerateInput("line endpoints coincide")
        return line
    if isinstance(obj, Circle):
        c = Circle(_mp_point(obj.center), _mp_point(obj.through))
        if mpmath.sqrt(c.radius2) <= tol:
            raise DegenerateInput("circle has zero radius")
        return c
    raise TypeError(f"expected Line or Circle, got {type(obj).__name__}")


def _sorted_hits(hits):
    return sorted(hits, key=lambda h: (h.x, h.y))


def intersect_basic(obj_a, obj_b, prec: Precision = Precision()) -> list[Hit]:
    """Intersections of two lines/circles (ruler and compass rules)."""
    with prec.context():
        tol = prec.tau
        A, B = _check_object(obj_a, tol), _check_object(obj_b, tol)
        if isinstance(A, Circle) and isinstance(B, Line):
            A, B = B, A
        if isinstance(A, Line) and isinstance(B, Line):
            hits = _line_line(A, B, tol)
        elif isinstance(A, Line):
            hits = _line_circle(A, B, tol)
        else:
            hits = _circle_circle(A, B, tol)
        return _sorted_hits(hits)


def _cross(ax, ay, bx, by):
    return ax * by - ay * bx


def _line_line(L1: Line, L2: Line, tol):
    d1 = (L1.q[0] - L1.p[0], L1.q[1] - L1.p[1])
    d2 = (L2.q[0] - L2.p[0], L2.q[1] - L2.p[1])
    den = _cross(*d1, *d2)
    n1 = mpmath.sqrt(d1[0] ** 2 + d1[1] ** 2)
    n2 = mpmath.sqrt(d2[0] ** 2 + d2[1] ** 2)
    w = (L2.p[0] - L1.p[0], L2.p[1] - L1.p[1])
    if abs(den) <= tol * n1 * n2:
        offset = abs(_cross(*d1, *w)) / n1
        if offset <= tol * max(1, abs(w[0]), abs(w[1])):
            raise CoincidentObjects("lines coincide")
        return []
    t = _cross(*w, *d2) / den
    return [Hit(L1.p[0] + t * d1[0], L1.p[1] + t * d1[1])]


def _line_circle(L: Line, C: Circle, tol):
    d = (L.q[0] - L.p[0], L.q[1] - L.p[1])
    m = (L.p[0] - C.center[0], L.p[1] - C.center[1])
    qa = d[0] ** 2 + d[1] ** 2
    qb = 2 * (d[0] * m[0] + d[1] * m[1])
    qc = m[0] ** 2 + m[1] ** 2 - C.radius2
    disc = qb * qb - 4 * qa * qc
    scale = max(qb * qb, abs(4 * qa * qc), qa * C.radius2)
    if abs(disc) <= tol * tol * scale:
        t = -qb / (2 * qa)
        return [Hit(L.p[0] + t * d[0], L.p[1] + t * d[1], 2)]
    if disc < 0:
        return []
    root = mpmath.sqrt(disc)
    # cancellation-free pair of roots
    qq = -(qb + (root if qb >= 0 else -root)) / 2
    ts = [qq / qa, qc / qq] if qq != 0 else [root / (2 * qa), -root / (2 * qa)]
    return [Hit(L.p[0] + t * d[0], L.p[1] + t * d[1]) for t in ts]


def _circle_circle(C1: Circle, C2: Circle, tol):
    dx, dy = C2.center[0] - C1.center[0], C2.center[1] - C1.center[1]
    dist2 = dx * dx + dy * dy
    r1, r2 = C1.radius2, C2.radius2
    size = max(r1, r2, 1)
    if dist2 <= tol * tol * size:
        if abs(r1 - r2) <= tol * size:
            raise CoincidentObjects("circles coincide")
        return []
    # radical line: points p with 2 (c2 - c1) . p = r1 - r2 + |c2|^2 - |c1|^2
    along = (dist2 + r1 - r2) / (2 * dist2)
    base = (C1.center[0] + along * dx, C1.center[1] + along * dy)
    h2 = r1 - along * along * dist2
    if abs(h2) <= tol * tol * size:
        return [Hit(base[0], base[1], 2)]
    if h2 < 0:
        return []
    h = mpmath.sqrt(h2 / dist2)
    return [Hit(base[0] - h * dy, base[1] + h * dx), Hit(base[0] + h * dy, base[1] - h * dx)]


# polynomial helpers, coefficient lists constant-first
def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pneg(p):
    return [-v for v in p]


def _pmul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _eliminate_y(circ, con):
    """Resultant in y of a monic-in-y circle and a general conic: a poly in x."""
    _, _, _, D1, E1, F1 = circ
    a, b, c, d, e, f = con
    A2, A1, A0 = [1], [E1], [F1, D1, 1]
    B2, B1, B0 = [c], [e, b], [f, d, a]
    m1 = _padd(_pmul(A2, B0), _pneg(_pmul(A0, B2)))
    m2 = _padd(_pmul(A2, B1), _pneg(_pmul(A1, B2)))
    m3 = _padd(_pmul(A1, B0), _pneg(_pmul(A0, B1)))
    return _padd(_pmul(m1, m1), _pneg(_pmul(m2, m3)))


def _swap_xy(coeffs):
    a, b, c, d, e, f = coeffs
    return (c, b, a, e, d, f)


def intersect_circle_conic(circle: Circle, k: ConicImplicit, prec: Precision = Precision()) -> list[Hit]:
    """Real intersections of a circle with a conic, by elimination of one variable."""
    with prec.context():
        tol = prec.tau
        circle = _check_object(circle, tol)
        circ = circle.implicit().mp()
        con = k.normalized().mp()
        for swapped in (False, True):
            c1, c2 = (_swap_xy(circ), _swap_xy(con)) if swapped else (circ, con)
            res = _eliminate_y(c1, c2)
            big = max(abs(v) for v in res)
            if big <= tol * tol:
                continue
            while abs(res[-1]) <= big * mpf(2) ** (-prec.bits):
                res.pop()
            if len(res) == 1:
                return []
            hits = _lift_roots(res, c1, c2, prec)
            if swapped:
                hits = [Hit(h.y, h.x, h.multiplicity) for h in hits]
            return _sorted_hits(hits)
        raise EliminationDegenerate("resultant vanishes in both variables")


def _lift_roots(res, circ, con, prec):
    tol = prec.tau
    circ_k, con_k = ConicImplicit(*circ), ConicImplicit(*con)
    # an m-fold root is only good to about eps^(1/m), so cluster and merge on
    # the selector's sqrt(tau) scale rather than on tau itself
    window = 4 * mpmath.sqrt(tol)
    roots = poly_roots(Poly.of(res), prec)
    xs = sorted(mpc(z).real for z in roots if abs(mpc(z).imag) <= window * max(1, abs(z)))
    clusters = []
    for x in xs:
        if clusters and abs(x - clusters[-1][-1]) <= window * max(1, abs(x)):
            clusters[-1].append(x)
        else:
            clusters.append([x])
    _, _, _, D1, E1, F1 = circ
    hits = []
    for group in clusters:
        x0 = sum(group) / len(group)
        a0 = x0 * x0 + D1 * x0 + F1
        disc = E1 * E1 - 4 * a0
        if disc < 0:
            if disc < -tol * max(1, E1 * E1, abs(4 * a0)):
                continue
            disc = mpf(0)
        root = mpmath.sqrt(disc)
        ys = [(-E1 + root) / 2] if root == 0 else [(-E1 + root) / 2, (-E1 - root) / 2]
        found = []
        for y in ys:
            p = (x0, y)
            if con_k.residual(p) > mpmath.sqrt(tol):
                continue
            p = _newton_polish(p, circ_k, con_k)
            if circ_k.residual(p) <= tol and con_k.residual(p) <= tol:
                found.append(p)
        if len(found) == 2 and _close(found[0], found[1], window):
            # both signs of a vanishing discriminant: one tangential point
            p = ((found[0][0] + found[1][0]) / 2, (found[0][1] + found[1][1]) / 2)
            found = [min((p, *found), key=lambda q: circ_k.residual(q) + con_k.residual(q))]
        if not found:
            continue
        share, extra = divmod(len(group), len(found))
        for i, p in enumerate(found):
            hits.append(Hit(p[0], p[1], max(1, share + (1 if i < extra else 0))))
    return _merge_hits(hits, window)


def _newton_polish(p, k1: ConicImplicit, k2: ConicImplicit, steps: int = 6):
    a1, b1, c1, d1, e1, f1 = k1.mp()
    a2, b2, c2, d2, e2, f2 = k2.mp()
    best = p
    best_r = k1.residual(p) + k2.residual(p)
    x, y = p
    for _ in range(steps):
        if best_r == 0:
            break
        g1, g2 = k1(x, y), k2(x, y)
        j11, j12 = 2 * a1 * x + b1 * y + d1, b1 * x + 2 * c1 * y + e1
        j21, j22 = 2 * a2 * x + b2 * y + d2, b2 * x + 2 * c2 * y + e2
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        x, y = x - (g1 * j22 - g2 * j12) / det, y - (j11 * g2 - j21 * g1) / det
        r = k1.residual((x, y)) + k2.residual((x, y))
        if r < best_r:
            best, best_r = (x, y), r
        else:
            break
    return best


def _close(p, q, window) -> bool:
    size = max(1, abs(p[0]), abs(p[1]))
    return abs(p[0] - q[0]) <= window * size and abs(p[1] - q[1]) <= window * size


def _merge_hits(hits, window):
    out = []
    for h in sorted(hits, key=lambda h: (h.x, h.y)):
        if out and _close((h.x, h.y), (out[-1].x, out[-1].y), window):
            prev = out.pop()
            h = Hit(prev.x, prev.y, prev.multiplicity + h.multiplicity)
        out.append(h)
    return out
