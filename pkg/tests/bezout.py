"""Wrappers that check every intersection the package computes.

Installed for every test by conftest: a call returning more than four
points, or a point off either curve by more than tau, fails the test that
triggered it. The counters let the acceptance suite report coverage.
"""
from mpmath import mpf

from fixedconic import conic, executor, planner
from fixedconic.numeric import Precision

STATS = {"calls": 0, "points": 0, "max_points": 0, "worst_ratio": mpf(0)}


class BezoutViolation(AssertionError):
    pass


def _implicit(obj):
    return obj if isinstance(obj, conic.ConicImplicit) else obj.implicit()


def _checked(fn):
    def wrapper(a, b, prec=Precision()):
        hits = fn(a, b, prec)
        STATS["calls"] += 1
        STATS["points"] += len(hits)
        STATS["max_points"] = max(STATS["max_points"], len(hits))
        if len(hits) > 4:
            raise BezoutViolation(f"{len(hits)} intersection points")
        ka, kb = _implicit(a), _implicit(b)
        with prec.context():
            for h in hits:
                r = max(ka.residual((h.x, h.y)), kb.residual((h.x, h.y)))
                STATS["worst_ratio"] = max(STATS["worst_ratio"], r / prec.tau)
                if r > prec.tau:
                    raise BezoutViolation(f"residual {r} above tau {prec.tau}")
        return hits

    wrapper.__wrapped__ = fn
    return wrapper


ORIGINAL = {name: getattr(conic, name) for name in ("intersect_basic", "intersect_circle_conic")}
CHECKED = {name: _checked(fn) for name, fn in ORIGINAL.items()}


def install(monkeypatch):
    for module in (conic, planner, executor):
        for name, fn in CHECKED.items():
            if hasattr(module, name):
                monkeypatch.setattr(module, name, fn)
