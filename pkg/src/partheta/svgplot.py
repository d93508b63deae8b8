"""Hand-rolled SVG emission for zero-curve atlases.

No plotting dependency: the document is assembled from fixed-format
strings so identical input gives identical bytes.  The vertical axis
carries sign(x) * log10(1 + |x|), which keeps both branches of a curve
readable while they run from order one to 1/q^8 and beyond.
"""

from __future__ import annotations

import math

from .errors import DomainError

_WIDTH = 640.0
_HEIGHT = 440.0
_MARGIN_L = 62.0
_MARGIN_R = 18.0
_MARGIN_T = 18.0
_MARGIN_B = 42.0

_CURVE_COLORS = ("#2166ac", "#b2182b", "#1b7837", "#762a83",
                 "#8c6d1f", "#35606e")
_ASYMPTOTE_COLOR = "#777777"


def _vscale(x: float) -> float:
    return math.copysign(math.log10(1.0 + abs(x)), x)


def _num(v: float) -> str:
    return "%.2f" % v


def _collect_domain(curves) -> tuple[float, float]:
    qs = [qv for c in curves for (qv, _) in c.samples]
    if not qs:
        return 0.0, 1.0
    if all(v > 0 for v in qs):
        return 0.0, 1.0
    if all(v < 0 for v in qs):
        return -1.0, 0.0
    raise DomainError("curves mix q > 0 and q < 0 samples")


def _asymptote_value(q: float, a: float) -> float | None:
    """-q^(-a), with the sign convention continued to q < 0 integer a."""
    if q > 0:
        return -(q ** -a)
    if float(a).is_integer():
        return -((-1.0) ** int(a)) * abs(q) ** -a
    return None


def _tick_rows(tmin: float, tmax: float):
    """Decade ticks (value, transformed) covering the vertical range."""
    rows = [(0.0, 0.0)] if tmin <= 0.0 <= tmax else []
    kmax = int(math.ceil(max(abs(tmin), abs(tmax)))) + 1
    step = max(1, (kmax + 7) // 8)
    for k in range(0, kmax + 1, step):
        for sgn in (1.0, -1.0):
            v = sgn * 10.0 ** k
            t = _vscale(v)
            if tmin <= t <= tmax:
                rows.append((v, t))
    return sorted(set(rows), key=lambda r: r[1])


def emit_curve_plot(curves, asymptotes=()) -> str:
    """SVG document: solid polylines per curve branch, dashed power overlays.

    curves are ZeroCurve objects (samples of (q, x) with branch labels);
    asymptotes is a list of exponents a, each drawn as x = -q^(-a).  The
    q axis spans (0, 1) or (-1, 0) according to the curves; byte output
    is deterministic for fixed input.
    """
    qlo, qhi = _collect_domain(curves)
    ts = [_vscale(xv) for c in curves for (_, xv) in c.samples]
    if ts:
        tmin, tmax = min(ts), max(ts)
        pad = 0.05 * (tmax - tmin) or 0.5
        tmin -= pad
        tmax += pad
    else:
        tmin, tmax = -2.1, 2.1

    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T

    def px(qv: float) -> float:
        return x0 + (qv - qlo) / (qhi - qlo) * (x1 - x0)

    def py(t: float) -> float:
        return y0 + (t - tmin) / (tmax - tmin) * (y1 - y0)

    out = []
    out.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
               'height="%d" viewBox="0 0 %d %d">'
               % (int(_WIDTH), int(_HEIGHT), int(_WIDTH), int(_HEIGHT)))
    out.append('<rect x="0" y="0" width="%d" height="%d" fill="white"/>'
               % (int(_WIDTH), int(_HEIGHT)))
    out.append('<rect x="%s" y="%s" width="%s" height="%s" fill="none" '
               'stroke="black" stroke-width="1"/>'
               % (_num(x0), _num(y1), _num(x1 - x0), _num(y0 - y1)))

    # q ticks at quarters of the domain
    for i in range(5):
        qv = qlo + (qhi - qlo) * i / 4.0
        xpix = px(qv)
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black" '
                   'stroke-width="1"/>'
                   % (_num(xpix), _num(y0), _num(xpix), _num(y0 + 5)))
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="middle">%s</text>'
                   % (_num(xpix), _num(y0 + 18), "%.2g" % qv))
    out.append('<text x="%s" y="%s" font-family="monospace" font-size="11" '
               'text-anchor="middle">q</text>'
               % (_num(0.5 * (x0 + x1)), _num(y0 + 33)))

    for v, t in _tick_rows(tmin, tmax):
        ypix = py(t)
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="black" '
                   'stroke-width="1"/>'
                   % (_num(x0 - 5), _num(ypix), _num(x0), _num(ypix)))
        label = "0" if v == 0 else "%.0e" % v
        out.append('<text x="%s" y="%s" font-family="monospace" '
                   'font-size="11" text-anchor="end">%s</text>'
                   % (_num(x0 - 8), _num(ypix + 4), label))
    out.append('<text x="%s" y="%s" font-family="monospace" font-size="11" '
               'text-anchor="middle" transform="rotate(-90 14 %s)">x</text>'
               % ("14", _num(0.5 * (y0 + y1)), _num(0.5 * (y0 + y1))))
    if tmin < 0 < tmax:
        out.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#bbbbbb" '
                   'stroke-width="1" stroke-dasharray="2 3"/>'
                   % (_num(x0), _num(py(0.0)), _num(x1), _num(py(0.0))))

    # dashed overlays x = -q^(-a)
    eps = 0.004 * (qhi - qlo)
    for a in asymptotes:
        run = []
        chunks = []
        for i in range(241):
            qv = qlo + eps + (qhi - qlo - 2 * eps) * i / 240.0
            xv = _asymptote_value(qv, float(a))
            t = None if xv is None else _vscale(xv)
            if t is None or not tmin <= t <= tmax:
                if len(run) > 1:
                    chunks.append(run)
                run = []
                continue
            run.append((px(qv), py(t)))
        if len(run) > 1:
            chunks.append(run)
        for run in chunks:
            pts = " ".join("%s,%s" % (_num(u), _num(v)) for u, v in run)
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1" stroke-dasharray="6 4"/>'
                       % (pts, _ASYMPTOTE_COLOR))

    # solid polylines, one per contiguous branch run of each curve
    for ci, c in enumerate(curves):
        color = _CURVE_COLORS[ci % len(_CURVE_COLORS)]
        run = []
        prev_label = None
        segments = []
        for (qv, xv), lab in zip(c.samples, c.branch_labels):
            if lab != prev_label and run:
                segments.append(run)
                run = [run[-1]]     # share the joint point across the fold
            run.append((px(qv), py(_vscale(xv))))
            prev_label = lab
        if run:
            segments.append(run)
        for run in segments:
            if len(run) < 2:
                continue
            pts = " ".join("%s,%s" % (_num(u), _num(v)) for u, v in run)
            out.append('<polyline points="%s" fill="none" stroke="%s" '
                       'stroke-width="1.5"/>' % (pts, color))
        if c.turning_point is not None:
            qv, xv = c.turning_point
            out.append('<circle cx="%s" cy="%s" r="3" fill="%s"/>'
                       % (_num(px(qv)), _num(py(_vscale(xv))), color))

    out.append("</svg>")
    return "\n".join(out) + "\n"
