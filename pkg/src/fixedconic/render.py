"""Static SVG figures of construction programs.

Everything is executed first, then drawn in float coordinates: circles,
lines (extended across the view), every conic that was intersected
(sampled branch by branch), and the point steps labeled by step id.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import mpmath

from .conic import Central, Circle, ConicImplicit, Line, Parabola, regular_branches, to_regular
from .executor import execute
from .numeric import Precision
from .program import POINT_STEPS, ConstructionProgram

SIZE = 640
MARGIN = 0.08
SAMPLES = 240


def _finite(*vals) -> bool:
    return all(math.isfinite(v) for v in vals)


def _viewport(points, circles, conic_boxes):
    xs, ys = [], []
    for x, y in points:
        xs.append(x)
        ys.append(y)
    for (cx, cy), r in circles:
        xs += [cx - r, cx + r]
        ys += [cy - r, cy + r]
    for x0, y0, x1, y1 in conic_boxes:
        xs += [x0, x1]
        ys += [y0, y1]
    if not xs:
        return (-1.0, -1.0, 1.0, 1.0)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0)
    if not math.isfinite(span) or span <= 1e-12 * max(1.0, abs(x0), abs(y0)):
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        if not _finite(cx, cy):
            cx = cy = 0.0
        return (cx - 1, cy - 1, cx + 1, cy + 1)
    pad = span * MARGIN
    return (x0 - pad, y0 - pad, x1 + pad, y1 + pad)


def _ellipse_box(frame, r: Central):
    u, rhs = float(r.u), float(r.rhs)
    al, be = (float(v) for v in r.center)
    ax, ay = math.sqrt(rhs / u), math.sqrt(rhs)
    cs, sn = float(frame.cos), float(frame.sin)
    cx, cy = cs * al - sn * be, sn * al + cs * be
    hx = math.hypot(cs * ax, sn * ay)
    hy = math.hypot(sn * ax, cs * ay)
    return (cx - hx, cy - hy, cx + hx, cy + hy)


def _conic_polylines(k: ConicImplicit, box, prec: Precision):
    """World-coordinate polylines covering the part of ``k`` near the view."""
    frame, r = to_regular(k, prec)
    x0, y0, x1, y1 = box
    reach = math.hypot(x1 - x0, y1 - y0) + math.hypot((x0 + x1) / 2, (y0 + y1) / 2)
    with mpmath.workprec(64):
        if isinstance(r, Parabola):
            reach += abs(float(r.a)) + abs(float(r.b))
            params = [mpmath.mpf(-reach) + 2 * reach * i / SAMPLES for i in range(SAMPLES + 1)]
        elif float(r.u) > 0:
            params = [2 * mpmath.pi * i / SAMPLES for i in range(SAMPLES + 1)]
        else:
            al, be = (float(v) for v in r.center)
            semi = min(math.sqrt(abs(float(r.rhs))), math.sqrt(abs(float(r.rhs) / float(r.u))))
            top = math.asinh((reach + math.hypot(al, be)) / semi) + 0.5
            params = [mpmath.mpf(-top) + 2 * top * i / SAMPLES for i in range(SAMPLES + 1)]
        out = []
        for branch in regular_branches(r, params):
            out.append([tuple(float(v) for v in frame.to_world(p)) for p in branch])
        return out, (_ellipse_box(frame, r) if isinstance(r, Central) and float(r.u) > 0 else None)


def render(p: ConstructionProgram, prec: Precision | None = None) -> str:
    """SVG document for ``p``; the view fits every finite element."""
    prec = prec or Precision(max(64, p.metadata.compile_precision_bits))
    val = execute(p, prec)
    points, circles, lines = {}, [], []
    for i, step in enumerate(p.steps):
        v = val.values[i]
        if isinstance(step, POINT_STEPS):
            xy = (float(v.real), float(v.imag))
            if _finite(*xy):
                points[i] = xy
        elif isinstance(v, Circle):
            c = (float(v.center[0]), float(v.center[1]))
            r = float(mpmath.sqrt(v.radius2))
            if _finite(*c, r):
                circles.append((i, c, r))
        elif isinstance(v, Line):
            a = (float(v.p[0]), float(v.p[1]))
            b = (float(v.q[0]), float(v.q[1]))
            if _finite(*a, *b):
                lines.append((i, a, b))

    conics = [p.fixed_conic] if p.mode == "fixed" else []
    for k in val.conics.values():
        if not any(k is c or k == c for c in conics):
            conics.append(k)
    boxes = []
    for k in conics:
        try:
            _, box = _conic_polylines(k, (-1, -1, 1, 1), prec)
        except Exception:  # a conic that cannot be regularized is simply not drawn
            continue
        if box and _finite(*box):
            boxes.append(box)
    view = _viewport(points.values(), [(c, r) for _, c, r in circles], boxes)
    return _svg(view, points, circles, lines, conics, prec)


def _svg(view, points, circles, lines, conics, prec) -> str:
    x0, y0, x1, y1 = view
    scale = SIZE / max(x1 - x0, y1 - y0)
    width = max(1.0, (x1 - x0) * scale)
    height = max(1.0, (y1 - y0) * scale)

    def tx(x, y):
        return ((x - x0) * scale, (y1 - y) * scale)

    def fmt(v):
        return f"{v:.3f}"

    stroke = max(0.5, SIZE / 640)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(width)}" height="{fmt(height)}" '
        f'viewBox="0 0 {fmt(width)} {fmt(height)}">',
        f'<rect width="{fmt(width)}" height="{fmt(height)}" fill="white"/>',
        '<g fill="none">',
    ]
    for k in conics:
        try:
            polys, _ = _conic_polylines(k, view, prec)
        except Exception:
            continue
        for poly in polys:
            pts = [tx(x, y) for x, y in poly if _finite(x, y)]
            pts = [(a, b) for a, b in pts if abs(a) < 1e6 and abs(b) < 1e6]
            if len(pts) > 1:
                path = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in pts)
                out.append(f'<polyline class="conic" points="{path}" stroke="#b03030" stroke-width="{fmt(2 * stroke)}"/>')
    reach = 4 * max(x1 - x0, y1 - y0)
    for i, a, b in lines:
        dx, dy = b[0] - a[0], b[1] - a[1]
        n = math.hypot(dx, dy)
        if n == 0:
            continue
        mx, my = (x0 + x1) / 2, (y0 + y1) / 2
        t0 = ((mx - a[0]) * dx + (my - a[1]) * dy) / (n * n)
        ext = reach / n
        p = tx(a[0] + (t0 - ext) * dx, a[1] + (t0 - ext) * dy)
        q = tx(a[0] + (t0 + ext) * dx, a[1] + (t0 + ext) * dy)
        out.append(
            f'<line class="line" id="s{i}" x1="{fmt(p[0])}" y1="{fmt(p[1])}" x2="{fmt(q[0])}" y2="{fmt(q[1])}" '
            f'stroke="#3060b0" stroke-width="{fmt(stroke)}"/>'
        )
    for i, c, r in circles:
        cx, cy = tx(*c)
        out.append(
            f'<circle class="circle" id="s{i}" cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(r * scale)}" '
            f'stroke="#308040" stroke-width="{fmt(stroke)}"/>'
        )
    out.append("</g>")
    out.append('<g font-family="sans-serif" font-size="9">')
    for i, (x, y) in points.items():
        px, py = tx(x, y)
        if not (abs(px) < 1e6 and abs(py) < 1e6):
            continue
        out.append(f'<circle class="point" cx="{fmt(px)}" cy="{fmt(py)}" r="2" fill="black"/>')
        out.append(f'<text x="{fmt(px + 3)}" y="{fmt(py - 3)}">{escape(str(i))}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
