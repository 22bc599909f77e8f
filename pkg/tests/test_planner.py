import math
import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpc, mpf

import oracles
from exact import exact_gadget, monic
from fixedconic.conic import (
    Central,
    Circle,
    ConicImplicit,
    Parabola,
    _eliminate_y,
    intersect_circle_conic,
    similarity_between,
    to_regular,
)
from fixedconic.errors import ClassUnreachable, DegenerateGadget, InvalidFixedConic
from fixedconic.executor import audit, execute, verify
from fixedconic.expr import eval as eval_expr
from fixedconic.expr import parse
from fixedconic.numeric import Precision, to_mpf
from fixedconic.planner import (
    choose_gadget_scale,
    compile,
    compile_trisection,
    reduce_to_fixed,
    trisection_expr,
)
from fixedconic.program import FIXED

P = Precision(256)
F = Fraction
ELLIPSE = ConicImplicit(1, 0, 4, 0, 0, -4)
PARABOLA = ConicImplicit(0, 0, 1, -1, 0, 0)
RECT = ConicImplicit(0, 1, 0, 0, 0, -1)
HYPER = ConicImplicit(1, 0, -4, 0, 0, -4)
HYPER_PLUS = ConicImplicit(-1, 0, 4, 0, 0, -4)
RECT_PLUS = ConicImplicit(0, 1, 0, 0, 0, 1)
CONICS = [ELLIPSE, PARABOLA, RECT, HYPER]


def _substitute_parabola(coeffs):
    """a x^2 + b xy + c y^2 + d x + e y + f with y = x^2, as x^0..x^4."""
    a, b, c, d, e, f = coeffs
    return [f, d, a + e, b, c]


# --- gadget algebra ---------------------------------------------------------

@pytest.mark.parametrize("u", [F(3, 4), F(-1), F(-3), F(1, 4), F(5, 2)])
@pytest.mark.parametrize("r", [F(8), F(2), F(1), F(1, 1000), F(1000), F(7, 3)])
def test_cube_root_gadget_identity(u, r):
    if r * r == -u ** 3:
        with pytest.raises(DegenerateGadget):
            exact_gadget("cbrt", r, u, F(1))
        return
    circle, conic, _ = exact_gadget("cbrt", r, u, F(1))
    assert _substitute_parabola(circle) == [0, -r, 0, 0, 1]
    assert monic(_eliminate_y(circle, conic)) == [0, -r, 0, 0, 1]


@pytest.mark.parametrize("u", [F(3, 4), F(-1), F(-3)])
@pytest.mark.parametrize("q", [F(1, 2), F(1), F(-1), F(9, 10), F(-1, 10)])
@pytest.mark.parametrize("c", [F(1), F(1, 2), F(3)])
def test_trisection_gadget_identity(u, q, c):
    lin, quad = q * c ** 3 / 4, u + 3 * c * c / 4
    if lin * lin / (4 * u) + quad * quad / 4 == 0:
        with pytest.raises(DegenerateGadget):
            exact_gadget("trisect", q, u, c)
        return
    circle, conic, _ = exact_gadget("trisect", q, u, c)
    cubic = [0, -q * c ** 3 / 4, -3 * c * c / 4, 0, 1]
    assert _substitute_parabola(circle) == cubic
    assert monic(_eliminate_y(circle, conic)) == cubic


def test_trisection_coefficients_at_unit_scale():
    circle, conic, _ = exact_gadget("trisect", F(1, 2), F(3, 4), F(1))
    assert circle[4] == F(-7, 4)
    assert conic == (F(3, 4), 0, 1, F(-1, 8), F(-3, 2), 0)


def test_parabolic_gadgets_are_regular_parabolas():
    circle, conic, g = exact_gadget("cbrt", F(8), None, F(1))
    assert isinstance(g.conic, Parabola)
    assert monic(_eliminate_y(circle, conic)) == [0, -8, 0, 0, 1]
    hits = intersect_circle_conic(Circle((4, F(1, 2)), (0, 0)), ConicImplicit(*conic), P)
    assert {(round(float(h.x), 9), round(float(h.y), 9)) for h in hits} == {(0.0, 0.0), (2.0, 4.0)}
    circle, conic, g = exact_gadget("trisect", F(1, 2), None, F(1))
    assert isinstance(g.conic, Parabola)
    assert monic(_eliminate_y(circle, conic)) == [0, F(-1, 8), F(-3, 4), 0, 1]


@pytest.mark.parametrize(
    "r, u, point",
    [(F(8), F(3, 4), (2, 4)), (F(1), F(-3), (1, 1)), (F(1), F(3, 4), (1, 1)), (F(2), F(3, 4), None)],
)
def test_cube_root_gadget_selects_the_expected_point(r, u, point):
    circle, conic, g = exact_gadget("cbrt", r, u, F(1))
    hits = intersect_circle_conic(Circle((-circle[3] / 2, -circle[4] / 2), (0, 0)), ConicImplicit(*conic), P)
    with P.context():
        target = mpc(oracles.CBRT2, oracles.CBRT2 ** 2) if point is None else mpc(*point)
        assert abs(g.expected - target) <= P.tau
        assert min(abs(mpc(h.x, h.y) - target) for h in hits) <= P.tau


@pytest.mark.parametrize("q, x", [(F(1), mpf(1)), (F(-1), mpf(1) / 2), (F(1, 2), oracles.COS20)])
def test_trisection_gadget_selects_largest_root(q, x):
    circle, conic, g = exact_gadget("trisect", q, F(3, 4), F(1))
    with P.context():
        assert abs(g.expected.real - x) <= P.tau
        hits = intersect_circle_conic(Circle((-circle[3] / 2, -circle[4] / 2), (0, 0)), ConicImplicit(*conic), P)
        assert max(h.x for h in hits) == pytest.approx(g.expected.real, abs=float(mpmath.sqrt(P.tau)))


def test_trisection_root_range():
    rng = random.Random(11)
    with P.context():
        for _ in range(200):
            q = F(rng.randint(-1000, 1000), 1000)
            c = rng.choice([F(1), F(1, 2), F(5, 4), F(4)])
            _, _, g = exact_gadget("trisect", q, F(-1), c)
            x = g.expected.real
            assert to_mpf(c) / 2 - P.tau <= x <= to_mpf(c) + P.tau


# --- scale choice -----------------------------------------------------------

def _cbrt_rhs(u, r, n):
    rp = n ** 3 * r
    return rp * rp / (4 * u) + u * u / 4, rp


def test_ellipse_scale_is_pure_conditioning():
    n = choose_gadget_scale(F(3, 4), 2, 1, "cbrt")
    assert 1 <= n ** 3 * 2 < 8


@pytest.mark.parametrize("r", [F(1, 1000), F(1), F(2), F(1000), F(10) ** 9])
@pytest.mark.parametrize("u", [F(-1), F(-3), F(-1, 5)])
@pytest.mark.parametrize("sign", [1, -1])
def test_cube_root_scale_reaches_class_with_margin(r, u, sign):
    n = choose_gadget_scale(u, r, sign, "cbrt")
    rhs, rp = _cbrt_rhs(u, r, n)
    neg, pos = rp * rp / (4 * u), u * u / 4
    assert (rhs > 0) == (sign > 0)
    if sign > 0:
        assert pos >= 2 * abs(neg)
    else:
        assert abs(neg) >= 2 * pos


def test_rectangular_hyperbola_scale_examples():
    n = choose_gadget_scale(-1, 2, 1, "cbrt")
    assert _cbrt_rhs(F(-1), F(2), n)[0] > 0
    assert n == F(1, 2)
    assert _cbrt_rhs(F(-1), F(2), choose_gadget_scale(-1, 2, -1, "cbrt"))[0] < 0


@pytest.mark.parametrize("q", [F(1, 10), F(-1, 10), F(9, 10), F(-9, 10), F(1)])
@pytest.mark.parametrize("u", [F(-1), F(-3), F(-1, 5)])
@pytest.mark.parametrize("sign", [1, -1])
def test_trisection_scale_reaches_class(q, u, sign):
    c = choose_gadget_scale(u, q, sign, "trisect")
    lin = q * c ** 3 / 4
    quad = u + 3 * c * c / 4
    rhs = lin * lin / (4 * u) + quad * quad / 4
    assert (rhs > 0) == (sign > 0)


def test_unreachable_classes():
    with pytest.raises(ClassUnreachable):
        choose_gadget_scale(F(3, 4), 2, -1, "cbrt")
    with pytest.raises(ClassUnreachable):
        choose_gadget_scale(F(-1), 0, -1, "trisect")


# --- reduction --------------------------------------------------------------

def exact_sqrt(q):
    root = F(math.isqrt(q.numerator), math.isqrt(q.denominator))
    assert root * root == q
    return root


def test_reduce_to_fixed_examples():
    with P.context():
        gadget = Central(F(3, 4), (4, F(3, 8)), F(8))
        fixed = Central(F(3, 4), (0, 0), F(2))
        s, tx, ty = reduce_to_fixed(gadget, fixed, exact_sqrt)
        assert (s, tx, ty) == (2, 4, F(3, 8))
        assert reduce_to_fixed(fixed, fixed, exact_sqrt) == (1, 0, 0)
        s, _, _ = reduce_to_fixed(Parabola(F(-1), 0, 0), Parabola(F(1), 0, 0), exact_sqrt)
        assert s < 0


# --- compile ----------------------------------------------------------------

def test_cube_root_of_two_on_the_ellipse():
    p = compile(parse("cbrt(2)"), ELLIPSE, "fixed", P)
    assert len(p.conic_steps()) == 1
    assert p.metadata.conic_depth == 1
    assert (p.metadata.sqrt_count, p.metadata.cbrt_count) == (0, 1)
    with P.context():
        assert abs(execute(p, P)[p.final] - oracles.CBRT2) <= P.tau


@pytest.mark.parametrize("conic", CONICS)
def test_square_roots_need_no_conic(conic):
    p = compile(parse("sqrt(2) + sqrt(1/2+i/3)"), conic, "fixed", P)
    assert p.conic_steps() == []
    assert p.metadata.conic_depth == 0


def test_nested_cube_roots_have_depth_two():
    p = compile(parse("cbrt(cbrt(2))"), ELLIPSE, "fixed", P)
    assert p.metadata.conic_depth == 2
    with P.context():
        assert abs(execute(p, P)[p.final] - oracles.NINTH_ROOT2) <= P.tau


def test_cube_roots_of_rational_cubes_still_use_the_conic():
    p = compile(parse("cbrt(8)"), RECT, "fixed", P)
    with P.context():
        assert abs(execute(p, P)[p.final] - 2) <= P.tau


def test_cube_root_of_zero_is_literal():
    p = compile(parse("cbrt(sqrt(2) - sqrt(2))"), ELLIPSE, "fixed", P)
    assert p.conic_steps() == [] and p.metadata.conic_depth == 0


def test_invalid_fixed_conics():
    for coeffs in [(1, 0, 1, 0, 0, -1), (1, 0, -1, 0, 0, 0), (1, 0, 1, 0, 0, 1)]:
        with pytest.raises(InvalidFixedConic):
            compile(parse("cbrt(2)"), ConicImplicit(*coeffs), "fixed", P)
    with pytest.raises(ValueError):
        compile(parse("cbrt(2)"), ELLIPSE, "sideways", P)


@pytest.mark.parametrize("conic", CONICS + [HYPER_PLUS, RECT_PLUS])
def test_fixed_mode_purity(conic):
    p = compile(parse("cbrt(1/2+i/3) + cbrt(-3+i/5)*cbrt(cbrt(2))"), conic, "fixed", P)
    refs = [p.steps[i].conic for i in p.conic_steps()]
    assert refs and all(ref is FIXED for ref in refs)
    assert audit(p) == []


@pytest.mark.parametrize("conic", CONICS + [HYPER_PLUS])
def test_lemma_mode_uses_session_form_parameter(conic):
    p = compile(parse("cbrt(1/2+i/3)"), conic, "lemma", P)
    for i in p.conic_steps():
        ref = p.steps[i].conic
        if p.form_parameter is None:
            assert type(ref).__name__ == "ParabolaRef"
        else:
            assert ref.u == p.form_parameter
    assert audit(p) == []


@pytest.mark.parametrize("q", [F(1, 2), F(1), F(-1), F(0), F(1, 20), F(-1, 20), F(9, 10), F(-9, 10)])
@pytest.mark.parametrize("conic", CONICS)
def test_trisection_program(q, conic):
    p = compile_trisection(q, conic, "fixed", P)
    with P.context():
        got = execute(p, P)[p.final]
        want = mpmath.cos(mpmath.acos(mpf(q.numerator) / q.denominator) / 3)
        assert abs(got - want) <= P.tau
        assert abs(eval_expr(trisection_expr(q), P) - want) <= P.tau


def test_trisection_rejects_out_of_range():
    with pytest.raises(ValueError):
        compile_trisection(F(3, 2), ELLIPSE)


def test_compile_is_deterministic():
    a = compile(parse("cbrt(1/2+i/3)"), RECT, "fixed", P)
    b = compile(parse("cbrt(1/2+i/3)"), RECT, "fixed", P)
    assert a == b


def _random_hyperbola(rng):
    """Random hyperbola in general position, either orientation class."""
    while True:
        a, b, c = (F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3))
        d, e, f = (F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3))
        k = ConicImplicit(a, b, c, d, e, f)
        if b * b - 4 * a * c <= 0:
            continue
        try:
            _, r = to_regular(k, Precision(128))
        except Exception:
            continue
        return k, r.class_sign


def test_class_match_totality_fuzz():
    rng = random.Random(5)
    prec = Precision(128)
    seen = set()
    for _ in range(30):
        k, sign = _random_hyperbola(rng)
        seen.add(sign)
        for text in ("cbrt(3/7)", "cbrt(-5+2*i)", "cbrt(1/20+i)"):
            r = verify(parse(text), k, "fixed", prec)
            assert r.passed, (k, text, r.abs_error, r.audit)
    assert seen == {1, -1}


@pytest.mark.parametrize("conic", [HYPER, HYPER_PLUS, RECT, RECT_PLUS])
def test_gadget_similarity_never_mismatches(conic):
    _, fixed = to_regular(conic, P)
    for r in (F(1, 1000), F(1), F(1000)):
        n = choose_gadget_scale(fixed.u, r, fixed.class_sign, "cbrt")
        with P.context():
            rp = to_mpf(n) ** 3 * to_mpf(r)
            gadget = Central(fixed.u, (rp / (2 * fixed.u), fixed.u / 2), rp * rp / (4 * fixed.u) + fixed.u ** 2 / 4)
            similarity_between(gadget, fixed, P)
