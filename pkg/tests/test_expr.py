from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mpc

import oracles
from fixedconic.errors import DivisionByZero
from fixedconic.expr import (
    Add,
    Cbrt,
    Conj,
    Div,
    ExprSyntaxError,
    GaussianRational,
    I,
    Lit,
    Mul,
    Neg,
    Sqrt,
    Sub,
    cbrt_depth,
    eval,
    lit,
    parse,
    principal_cbrt,
    radical_counts,
    show,
)
from fixedconic.numeric import Precision

P = Precision(256)


def test_parse_cube_root_of_two():
    assert parse("cbrt(2)") == Cbrt(lit(2))


def test_rational_literal_binds_tighter_than_division():
    assert parse("1/2 + i/3") == Add(lit(Fraction(1, 2)), Div(Lit(I), lit(3)))
    assert parse("1 / 2") == Div(lit(1), lit(2))


def test_minus_folds_into_literals():
    assert parse("-8") == lit(-8)
    assert parse("-(8)") == lit(-8)
    assert parse("-sqrt(2)") == Neg(Sqrt(lit(2)))


def test_precedence():
    assert parse("1+2*3") == Add(lit(1), Mul(lit(2), lit(3)))
    assert parse("1-2-3") == Sub(Sub(lit(1), lit(2)), lit(3))
    assert parse("conj(i)*2") == Mul(Conj(Lit(I)), lit(2))


@pytest.mark.parametrize(
    "text, position",
    [("cbrt(2", 6), ("2 +", 3), ("foo(2)", 0), ("1/0", 0), ("2 $ 3", 2), ("(1))", 3), ("", 0)],
)
def test_syntax_errors_report_position(text, position):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.position == position


def test_gaussian_rational_arithmetic():
    a = GaussianRational(Fraction(1, 2), Fraction(1, 3))
    b = GaussianRational(2, -1)
    assert (a * b) / b == a
    assert a + b - b == a
    assert a.conj().conj() == a
    assert GaussianRational.parse(str(a)) == a
    assert GaussianRational.parse("-3-1/5*i") == GaussianRational(-3, Fraction(-1, 5))
    with pytest.raises(DivisionByZero):
        a / GaussianRational(0)


def test_eval_against_frozen_oracles():
    assert abs(eval(parse("cbrt(2)"), P) - oracles.CBRT2) <= P.tau ** 2 * 4
    assert abs(eval(parse("cbrt(1/2+i/3)"), P) - oracles.CBRT_HALF_THIRD) <= P.tau ** 2 * 4
    assert abs(eval(parse("cbrt(-3+i/5)"), P) - oracles.CBRT_MINUS3_FIFTH) <= P.tau ** 2 * 4


def test_principal_branches():
    with P.context():
        z = eval(parse("cbrt(-8)"), P)
        assert abs(z - mpc(1, mpmath.sqrt(3))) <= P.tau
        assert abs(eval(parse("sqrt(-4)"), P) - mpc(0, 2)) <= P.tau
        assert eval(parse("cbrt(0)"), P) == 0
        assert abs(principal_cbrt(mpc(0, 1)) - mpmath.expj(mpmath.pi / 6)) <= P.tau


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        eval(parse("1/(i-i)"), P)


def test_counts_and_depth():
    e = parse("cbrt(cbrt(2)) + sqrt(cbrt(3)) + sqrt(2)")
    assert radical_counts(e) == (2, 3)
    assert cbrt_depth(e) == 2
    assert cbrt_depth(parse("sqrt(2)")) == 0


_leaf = st.one_of(
    st.builds(lambda a, b: Lit(GaussianRational(Fraction(a, b))), st.integers(-9, 9), st.integers(1, 9)),
    st.sampled_from([Lit(I), Lit(-I)]),
)


def _no_neg_literal(arg):
    return Neg(arg) if not isinstance(arg, Lit) else Neg(Sqrt(arg))


_parsed_trees = st.recursive(
    _leaf,
    lambda kids: st.one_of(
        st.builds(Add, kids, kids), st.builds(Sub, kids, kids), st.builds(Mul, kids, kids),
        st.builds(Div, kids, kids), st.builds(_no_neg_literal, kids), st.builds(Conj, kids),
        st.builds(Sqrt, kids), st.builds(Cbrt, kids),
    ),
    max_leaves=8,
)


@settings(max_examples=200)
@given(_parsed_trees)
def test_show_parses_back(e):
    assert parse(show(e)) == e


@settings(max_examples=100)
@given(_parsed_trees)
def test_printed_text_is_a_fixed_point(e):
    text = show(e)
    assert show(parse(text)) == text


def test_complex_literal_prints_to_an_equal_value():
    e = lit(Fraction(1, 2), Fraction(-1, 3))
    assert eval(parse(show(e)), P) == eval(e, P)
