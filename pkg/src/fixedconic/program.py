"""Construction programs: the step vocabulary shared by planner and executor."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import mpmath
from mpmath import mpc, mpf

from .conic import ConicImplicit
from .errors import NoIntersection, NoMatch, SelectionAmbiguous
from .expr import GaussianRational

FIELD_OPS = {"add": 2, "sub": 2, "mul": 2, "div": 2, "neg": 1, "conj": 1}


@dataclass(frozen=True)
class SelectorHint:
    """Expected coordinates (decimal strings at compile precision)."""

    x: str
    y: str
    min_separation: str = "inf"

    def point(self) -> mpc:
        return mpc(mpf(self.x), mpf(self.y))


@dataclass(frozen=True)
class PointLit:
    value: GaussianRational


@dataclass(frozen=True)
class MacroField:
    op: str
    args: tuple


@dataclass(frozen=True)
class MacroSqrt:
    arg: int


@dataclass(frozen=True)
class CircleDef:
    center: int
    through: int


@dataclass(frozen=True)
class LineDef:
    p: int
    q: int


@dataclass(frozen=True)
class IntersectBasic:
    a: int
    b: int
    pick: SelectorHint


class FixedRef:
    """Reference to the program's single fixed conic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "FIXED"

    def __reduce__(self):
        return (FixedRef, ())


FIXED = FixedRef()


@dataclass(frozen=True)
class CentralRef:
    """Regular central conic u (x-a)^2 + (y-b)^2 = rhs; ``center`` is the point a + ib."""

    u: int
    center: int
    rhs: int


@dataclass(frozen=True)
class ParabolaRef:
    """Regular parabola x = lam (y-a)^2 + b."""

    lam: int
    a: int
    b: int


ConicRef = Union[FixedRef, CentralRef, ParabolaRef]


@dataclass(frozen=True)
class ConicIntersect:
    circle: int
    conic: ConicRef
    pick: SelectorHint


Step = Union[PointLit, MacroField, MacroSqrt, CircleDef, LineDef, IntersectBasic, ConicIntersect]
POINT_STEPS = (PointLit, MacroField, MacroSqrt, IntersectBasic, ConicIntersect)


@dataclass(frozen=True)
class Metadata:
    sqrt_count: int = 0
    cbrt_count: int = 0
    conic_depth: int = 0
    compile_precision_bits: int = 256
    expression: Optional[str] = None


@dataclass(frozen=True)
class ConstructionProgram:
    mode: str
    fixed_conic: ConicImplicit
    working_frame: tuple
    steps: tuple
    final: int
    form_parameter: Optional[int] = None
    metadata: Metadata = field(default_factory=Metadata)

    def conic_steps(self) -> list[int]:
        return [i for i, s in enumerate(self.steps) if isinstance(s, ConicIntersect)]


def select_nearest(candidates: list, expected: mpc, tau) -> tuple[mpc, mpf]:
    """Candidate nearest ``expected`` plus its distance to the runner-up.

    The nearest must lie within sqrt(tau) of the expectation and the runner-up
    must be more than 2 sqrt(tau) away, both relative to max(1, |expected|).
    """
    if not candidates:
        raise NoIntersection("no real intersection")
    scale = max(mpf(1), abs(expected))
    window = mpmath.sqrt(tau) * scale
    ranked = sorted(candidates, key=lambda z: abs(z - expected))
    best = ranked[0]
    if abs(best - expected) > window:
        raise NoMatch(f"no candidate within {mpmath.nstr(window, 5)} of the hint")
    if len(ranked) > 1:
        if abs(ranked[1] - expected) <= 2 * window:
            raise SelectionAmbiguous("two candidates match the hint")
        return best, abs(ranked[1] - best)
    return best, mpf("inf")
