"""Expressions over Q(i) closed under field operations, conj, sqrt and cbrt.

Grammar (whitespace is insignificant except inside a rational token)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | atom
    atom    := RATIONAL | "i" | "(" expr ")" | FUNC "(" expr ")"
    FUNC    := "sqrt" | "cbrt" | "conj"
    RATIONAL:= DIGITS ("/" DIGITS)?        e.g. 3, 22/7 (no spaces inside)

``1/2`` is a single literal while ``1 / 2`` is a division. A minus sign
directly applied to a literal folds into it, so ``-8`` is ``Lit(-8)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mpc

from .errors import DivisionByZero
from .numeric import Precision, to_mpf


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Inverse of :meth:`__str__` for the ``re[+im*i]`` form used in traces."""
        text = text.strip()
        m = re.fullmatch(r"(-?\d+(?:/\d+)?)(?:([+-]\d+(?:/\d+)?)\*i)?", text)
        if not m:
            raise ValueError(f"not a Gaussian rational: {text!r}")
        return cls(Fraction(m.group(1)), Fraction(m.group(2) or 0))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"

    def __add__(self, o):
        o = _gr(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = _gr(o)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _gr(o) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        o = _gr(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _gr(o)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise DivisionByZero("division by zero")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, o):
        return _gr(o) / self

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re or self.im)

    def to_mpc(self) -> mpc:
        return mpc(to_mpf(self.re), to_mpf(self.im))


def _gr(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(Fraction(x))
    raise TypeError(f"cannot treat {x!r} as a Gaussian rational")


I = GaussianRational(0, 1)


# --- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: GaussianRational


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Conj:
    arg: "Expr"


@dataclass(frozen=True)
class Sqrt:
    arg: "Expr"


@dataclass(frozen=True)
class Cbrt:
    arg: "Expr"


Expr = Union[Lit, Add, Sub, Mul, Div, Neg, Conj, Sqrt, Cbrt]
BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
UNARY_FUNCS = {"sqrt": Sqrt, "cbrt": Cbrt, "conj": Conj}


def lit(re, im=0) -> Lit:
    return Lit(GaussianRational(Fraction(re), Fraction(im)))


# --- parsing ---------------------------------------------------------------

class ExprSyntaxError(SyntaxError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position
        self.text = text


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_]+)|(?P<op>[-+*/()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value:
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", self.text, pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", self.text, pos)
        return e

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            inner = self.unary()
            if isinstance(inner, Lit):
                return Lit(-inner.value)
            return Neg(inner)
        return self.atom()

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            if "/" in text:
                num, den = text.split("/")
                if int(den) == 0:
                    raise ExprSyntaxError("zero denominator in literal", self.text, pos)
            return Lit(GaussianRational(Fraction(text)))
        if kind == "name":
            if text == "i":
                return Lit(I)
            if text in UNARY_FUNCS:
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return UNARY_FUNCS[text](inner)
            raise ExprSyntaxError(f"unknown name {text!r}", self.text, pos)
        if text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", self.text, pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


def show(e: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree.

    This holds for every tree the parser produces. The grammar has no single
    token for a literal like 1/2 + i/3, so such a hand-built literal prints as
    a sum that parses to an equal value but a different tree.
    """
    if isinstance(e, Lit):
        v = e.value
        if v.im == 0:
            return str(v.re)
        if v == I:
            return "i"
        if v == -I:
            return "-i"
        re_part = f"{v.re} + " if v.re else ""
        im = v.im
        im_part = "i" if im == 1 else f"{im}*i"
        return f"({re_part}{im_part})" if im > 0 else f"({re_part}-({abs(im)}*i))"
    for cls, sym in BINARY.items():
        if isinstance(e, cls):
            return f"({show(e.left)} {sym} {show(e.right)})"
    if isinstance(e, Neg):
        return f"-({show(e.arg)})"
    for name, cls in UNARY_FUNCS.items():
        if isinstance(e, cls):
            return f"{name}({show(e.arg)})"
    raise TypeError(f"not an expression: {e!r}")


# --- evaluation ------------------------------------------------------------

def principal_sqrt(z: mpc) -> mpc:
    return mpmath.sqrt(mpc(z))


def principal_cbrt(z: mpc) -> mpc:
    """Cube root with argument in (-pi/3, pi/3]; arg of a negative real is +pi."""
    z = mpc(z)
    if z == 0:
        return mpc(0)
    theta = mpmath.atan2(z.imag, z.real)
    return mpmath.cbrt(abs(z)) * mpmath.expj(theta / 3)


def eval(e: Expr, prec: Precision = Precision()) -> mpc:  # noqa: A001 - mirrors the operation name
    """Direct high-precision value of ``e`` using principal branches."""
    with prec.context():
        return +_eval(e)


def _eval(e: Expr) -> mpc:
    if isinstance(e, Lit):
        return e.value.to_mpc()
    if isinstance(e, Add):
        return _eval(e.left) + _eval(e.right)
    if isinstance(e, Sub):
        return _eval(e.left) - _eval(e.right)
    if isinstance(e, Mul):
        return _eval(e.left) * _eval(e.right)
    if isinstance(e, Div):
        den = _eval(e.right)
        if den == 0:
            raise DivisionByZero(f"division by zero in {show(e)}")
        return _eval(e.left) / den
    if isinstance(e, Neg):
        return -_eval(e.arg)
    if isinstance(e, Conj):
        return mpmath.conj(_eval(e.arg))
    if isinstance(e, Sqrt):
        return principal_sqrt(_eval(e.arg))
    if isinstance(e, Cbrt):
        return principal_cbrt(_eval(e.arg))
    raise TypeError(f"not an expression: {e!r}")


def children(e: Expr) -> tuple:
    if isinstance(e, Lit):
        return ()
    if isinstance(e, tuple(BINARY)):
        return (e.left, e.right)
    return (e.arg,)


def radical_counts(e: Expr) -> tuple[int, int]:
    sq = cb = 0
    stack = [e]
    while stack:
        node = stack.pop()
        sq += isinstance(node, Sqrt)
        cb += isinstance(node, Cbrt)
        stack.extend(children(node))
    return sq, cb


def cbrt_depth(e: Expr) -> int:
    """Nesting depth of Cbrt nodes."""
    own = 1 if isinstance(e, Cbrt) else 0
    return own + max((cbrt_depth(c) for c in children(e)), default=0)
