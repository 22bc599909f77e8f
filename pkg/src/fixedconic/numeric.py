"""Arbitrary-precision scalars and small-degree polynomial roots.

All real and complex values are :mod:`mpmath` numbers. The working precision
is carried by mpmath's context, so every entry point takes a :class:`Precision`
and evaluates inside :meth:`Precision.context`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import mpmath
from mpmath import mp, mpc, mpf

from .errors import NonConvergence, ZeroPolynomial

BigReal = mpf
BigComplex = mpc
Scalar = Union[int, Fraction, mpf]

MAX_DEGREE = 8


@dataclass(frozen=True)
class Precision:
    bits: int = 256

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError(f"precision must be at least 64 bits, got {self.bits}")

    @property
    def tau(self) -> mpf:
        """Global tolerance 2^(-bits/2)."""
        return mpf(2) ** (-mpf(self.bits) / 2)

    @property
    def digits(self) -> int:
        """Decimal digits that round-trip a value at this precision."""
        return -(-self.bits * 30103 // 100000) + 5

    def context(self):
        return mp.workprec(self.bits)

    def extra(self, bits: int) -> "Precision":
        return Precision(self.bits + bits)


def to_mpf(x: Scalar) -> mpf:
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def to_fraction(x: Scalar) -> Fraction:
    """Exact rational value of ``x``; binary floats are dyadic rationals."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    x = mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError(f"{x} has no rational value")
    man, exp = x.man_exp
    man = -int(man) if x < 0 else int(man)
    if exp >= 0:
        return Fraction(man << exp)
    return Fraction(man, 1 << -exp)


def decimal(x, prec: Precision) -> str:
    """Decimal string with enough digits to restore ``x`` at ``prec``."""
    with prec.context():
        return mpmath.nstr(mpf(x), prec.digits)


@dataclass(frozen=True)
class Poly:
    """Real or complex polynomial, constant term first."""

    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ZeroPolynomial("empty coefficient list")
        cs = list(self.coefficients)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if len(cs) - 1 > MAX_DEGREE:
            raise ValueError(f"degree {len(cs) - 1} exceeds cap {MAX_DEGREE}")

    @classmethod
    def of(cls, coefficients: Iterable) -> "Poly":
        return cls(tuple(coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def normalized(self) -> "Poly":
        cs = list(self.coefficients)
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        return Poly(tuple(cs))

    def is_real(self) -> bool:
        return all(not isinstance(c, mpc) or c.imag == 0 for c in self.coefficients)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + _mp(c)
        return acc

    def scale(self) -> mpf:
        return max(abs(_mp(c)) for c in self.coefficients)


def _mp(c):
    if isinstance(c, Fraction):
        return to_mpf(c)
    if isinstance(c, (mpf, mpc)):
        return c
    return mpmath.mpmathify(c)


def _residual_ok(p: Poly, z, tau) -> bool:
    bound = tau * p.scale() * max(mpf(1), abs(z)) ** p.degree
    return abs(p(z)) <= bound


def _order_key(z):
    z = mpc(z)
    return (z.real, z.imag)


def _pair_conjugates(roots: list, tol) -> list:
    """Make non-real roots of a real polynomial come in exact conjugate pairs."""
    out = list(roots)
    used = [False] * len(out)
    for i, z in enumerate(out):
        if used[i] or abs(mpc(z).imag) <= tol * max(1, abs(z)):
            continue
        used[i] = True
        best, best_d = None, None
        for j in range(len(out)):
            if used[j] or j == i:
                continue
            d = abs(mpc(out[j]) - mpmath.conj(z))
            if best_d is None or d < best_d:
                best, best_d = j, d
        if best is not None:
            used[best] = True
            avg = (mpc(z) + mpmath.conj(out[best])) / 2
            out[i], out[best] = avg, mpmath.conj(avg)
    return out


def poly_roots(p: Poly, prec: Precision) -> list:
    """All complex roots of ``p`` with multiplicity, ordered by (re, im)."""
    with prec.context():
        q = p.normalized()
        coeffs = [_mp(c) for c in q.coefficients]
        if all(c == 0 for c in coeffs):
            raise ZeroPolynomial("all coefficients are zero")
        q = Poly.of(coeffs)
        if q.degree == 0:
            return []
        zeros = 0
        while coeffs[zeros] == 0:
            zeros += 1
        rest = coeffs[zeros:]
        roots = [mpc(0)] * zeros
        if len(rest) > 1:
            roots += _durand_kerner(rest, prec)
        tau = prec.tau
        if q.is_real():
            roots = _pair_conjugates(roots, tau)
        roots = [+mpc(z) for z in roots]
        for z in roots:
            if not _residual_ok(q, z, tau):
                raise NonConvergence(f"residual contract failed at {prec.bits} bits")
        return sorted(roots, key=_order_key)


def _durand_kerner(coeffs_low_first: Sequence, prec: Precision) -> list:
    high_first = list(reversed(coeffs_low_first))
    tau = prec.tau
    target = Poly.of(coeffs_low_first)
    for steps, extra in ((100, prec.bits), (400, 2 * prec.bits)):
        try:
            roots = mpmath.polyroots(high_first, maxsteps=steps, cleanup=True, extraprec=extra)
        except mpmath.libmp.NoConvergence:
            continue
        if all(_residual_ok(target, z, tau) for z in roots):
            return list(roots)
    # Clustered roots (tangential or osculating contact) stall the iteration.
    # Companion eigenvalues still land within eps^(1/m) of an m-fold root.
    try:
        roots = _companion_roots(coeffs_low_first, prec.bits + 2 * prec.bits)
    except (mpmath.libmp.NoConvergence, ZeroDivisionError):
        roots = None
    if roots is not None and all(_residual_ok(target, z, tau) for z in roots):
        return roots
    raise NonConvergence(f"root finding did not converge at {prec.bits} bits")


def _companion_roots(coeffs_low_first: Sequence, bits: int) -> list:
    with mp.workprec(bits):
        lead = mpmath.mpmathify(coeffs_low_first[-1])
        n = len(coeffs_low_first) - 1
        m = mpmath.zeros(n, n)
        for i in range(1, n):
            m[i, i - 1] = 1
        for i in range(n):
            m[i, n - 1] = -mpmath.mpmathify(coeffs_low_first[i]) / lead
        values = mpmath.eig(m, left=False, right=False)
    return [+mpc(z) for z in values]


def real_roots(p: Poly, prec: Precision) -> list:
    """Real roots of ``p`` (|imag| <= tau), ascending, multiplicity kept."""
    with prec.context():
        tau = prec.tau
        out = [mpc(z).real for z in poly_roots(p, prec) if abs(mpc(z).imag) <= tau]
        return sorted(out)
