"""Deterministic SVG rendering of a planned path.

The output has one ``<polyline>`` (the robot path). Tether snapshots and the
relative-angle chart are ``<path>`` elements, obstacles and footprints are
``<polygon>`` elements.
"""
from __future__ import annotations

import math

from .geometry import TWO_PI, footprint_at
from .scenario import Scenario
from .validate import replay

SCALE = 6.0
MARGIN = 10.0
CHART_H = 140.0


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_svg(sc: Scenario, result, snapshots: int = 6, step: float = 0.05) -> bytes:
    """SVG of the map, the path, tether snapshots and a relative-angle strip chart."""
    m = sc.map
    wpx = m.width * m.resolution * SCALE
    hpx = m.height * m.resolution * SCALE
    W = wpx + 2 * MARGIN
    H = hpx + CHART_H + 3 * MARGIN

    def X(x):
        return MARGIN + x * SCALE

    def Y(y):
        return MARGIN + hpx - y * SCALE

    def pts(seq):
        return " ".join(f"{_f(X(p[0]))},{_f(Y(p[1]))}" for p in seq)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(W)}" height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}">',
        f'<rect x="{_f(MARGIN)}" y="{_f(MARGIN)}" width="{_f(wpx)}" height="{_f(hpx)}" fill="white" stroke="black"/>',
    ]
    for ob in sc.obstacles:
        out.append(f'<polygon class="obstacle" points="{pts(ob.boundary)}" fill="#555" stroke="none"/>')

    poses = [p for p in getattr(result, "path", result) if len(p) >= 3 and not math.isnan(p[2])]
    samples = []
    if poses:
        try:
            for param, pose, chain in replay(sc, poses, step):
                o, s = chain[-2], chain[-1]
                phi = math.atan2(o[1] - s[1], o[0] - s[0]) - pose[2]
                samples.append((param, pose, list(chain), phi))
        except (ValueError, LookupError):
            samples = []

    # tether snapshots at evenly spaced samples
    if samples and snapshots > 0:
        k = min(snapshots, len(samples))
        idx = sorted({round(i * (len(samples) - 1) / max(1, k - 1)) for i in range(k)})
        for i in idx:
            chain = samples[i][2]
            d = "M " + " L ".join(f"{_f(X(p[0]))} {_f(Y(p[1]))}" for p in chain)
            out.append(f'<path class="tether" d="{d}" fill="none" stroke="#999" stroke-width="1"/>')

    if poses:
        out.append(f'<polygon class="start" points="{pts(footprint_at(sc.footprint, poses[0]))}" fill="none" stroke="green" stroke-width="1.5"/>')
        out.append(f'<polygon class="end" points="{pts(footprint_at(sc.footprint, poses[-1]))}" fill="none" stroke="red" stroke-width="1.5"/>')
        out.append(f'<polyline class="path" points="{pts(poses)}" fill="none" stroke="blue" stroke-width="2"/>')

    bx, by = sc.base
    tri = [(bx, by + 0.9), (bx - 0.8, by - 0.5), (bx + 0.8, by - 0.5)]
    out.append(f'<polygon class="base" points="{pts(tri)}" fill="orange" stroke="black"/>')
    gx, gy = sc.goal
    out.append(f'<circle class="goal" cx="{_f(X(gx))}" cy="{_f(Y(gy))}" r="{_f(0.6 * SCALE)}" fill="none" stroke="red"/>')

    # strip chart of phi unwrapped around the interval's lower bound
    iv = sc.sef_interval
    top = 2 * MARGIN + hpx
    lo, hi = iv.lo, iv.lo + iv.width
    pad = 0.25 * iv.width + 0.1
    vmin, vmax = lo - pad, hi + pad

    def CY(v):
        v = min(max(v, vmin), vmax)
        return top + CHART_H * (vmax - v) / (vmax - vmin)

    out.append(f'<rect class="chart" x="{_f(MARGIN)}" y="{_f(top)}" width="{_f(wpx)}" height="{_f(CHART_H)}" fill="white" stroke="black"/>')
    for v in (lo, hi):
        out.append(f'<line class="bound" x1="{_f(MARGIN)}" y1="{_f(CY(v))}" x2="{_f(MARGIN + wpx)}" y2="{_f(CY(v))}" stroke="red" stroke-dasharray="4 3"/>')
    if samples:
        total = samples[-1][0] or 1.0
        pieces = []
        for param, _, _, phi in samples:
            # place phi on the branch nearest the band
            v = lo + (phi - lo) % TWO_PI
            if v > hi and v - hi > lo - (v - TWO_PI):
                v -= TWO_PI
            pieces.append(f"{_f(MARGIN + wpx * param / total)} {_f(CY(v))}")
        out.append(f'<path class="phi" d="M {" L ".join(pieces)}" fill="none" stroke="blue"/>')
    out.append(f'<text x="{_f(MARGIN + 4)}" y="{_f(top + 14)}" font-size="12">relative angle vs. path length</text>')
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode()
