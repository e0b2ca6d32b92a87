"""Planar geometry primitives shared by the planner.

Points are plain ``(x, y)`` float tuples in grid units; :class:`Point2` is a
named tuple so either form is accepted everywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Tuple

TWO_PI = 2.0 * math.pi
EPS = 1e-9

Point = Tuple[float, float]


class Point2(NamedTuple):
    x: float
    y: float


class Pose2(NamedTuple):
    x: float
    y: float
    theta: float

    @property
    def xy(self) -> Point:
        return (self.x, self.y)


def wrap_to_pi(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = math.remainder(a, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


def wrap_2pi(a: float) -> float:
    """Map an angle to [0, 2*pi)."""
    r = math.fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


@dataclass(frozen=True)
class AngleInterval:
    """Closed arc on the circle running counter-clockwise from ``lo`` to ``hi``."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        w = wrap_2pi(self.hi - self.lo)
        if not 0.0 < w < TWO_PI:
            raise ValueError(f"degenerate angle interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return wrap_2pi(self.hi - self.lo)

    @property
    def mid(self) -> float:
        return wrap_to_pi(self.lo + 0.5 * self.width)

    def offset(self, a: float) -> float:
        """Counter-clockwise distance of ``a`` from ``lo``."""
        return wrap_2pi(a - self.lo)

    def shrink(self, margin: float) -> "AngleInterval":
        if margin <= 0.0:
            return self
        if 2.0 * margin >= self.width:
            raise ValueError("margin swallows the whole interval")
        return AngleInterval(self.lo + margin, self.lo + self.width - margin)

    def __contains__(self, a: float) -> bool:
        return circular_contains(self, a)


def circular_contains(interval: AngleInterval, a: float) -> bool:
    return wrap_2pi(a - interval.lo) <= wrap_2pi(interval.hi - interval.lo)


def cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    """z-component of (a - o) x (b - o)."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def dist(p: Point, q: Point) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def polyline_length(pts: Sequence[Point]) -> float:
    return sum(dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))


def signed_area(vertices: Sequence[Point]) -> float:
    n = len(vertices)
    s = 0.0
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point, eps: float = EPS) -> bool:
    """Closed segment intersection, touching counts."""
    d1 = cross(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = cross(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = cross(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = cross(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_seg(a: Point, b: Point, p: Point, d: float) -> bool:
        return (
            abs(d) <= eps
            and min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps
        )

    return (
        on_seg(q1, q2, p1, d1)
        or on_seg(q1, q2, p2, d2)
        or on_seg(p1, p2, q1, d3)
        or on_seg(p1, p2, q2, d4)
    )


def point_in_polygon(p: Point, vertices: Sequence[Point]) -> bool:
    """Even-odd test; points on the boundary may go either way."""
    x, y = p
    inside = False
    n = len(vertices)
    j = n - 1
    for i in range(n):
        xi, yi = vertices[i]
        xj, yj = vertices[j]
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xc:
                inside = not inside
        j = i
    return inside


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


class Polygon:
    """Simple counter-clockwise polygon."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Sequence[float]]):
        vs = tuple((float(v[0]), float(v[1])) for v in vertices)
        if len(vs) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if signed_area(vs) <= 0.0:
            raise ValueError("polygon must be counter-clockwise with positive area")
        n = len(vs)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if segments_intersect(vs[i], vs[(i + 1) % n], vs[j], vs[(j + 1) % n], 0.0):
                    raise ValueError("polygon is not simple")
        self.vertices = vs

    def __iter__(self):
        return iter(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polygon({list(self.vertices)!r})"

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def is_convex(self) -> bool:
        n = len(self.vertices)
        for i in range(n):
            a, b, c = self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]
            if cross(a[0], a[1], b[0], b[1], c[0], c[1]) < -1e-12:
                return False
        return True

    def max_radius(self) -> float:
        return max(math.hypot(x, y) for x, y in self.vertices)


def footprint_at(body: Polygon | Sequence[Point], pose: Pose2) -> list[Point]:
    """Place an egocentric polygon at ``pose`` (rotate by theta, then translate)."""
    c, s = math.cos(pose[2]), math.sin(pose[2])
    x0, y0 = pose[0], pose[1]
    return [(x0 + c * x - s * y, y0 + s * x + c * y) for x, y in body]


def footprint_inverse(world: Sequence[Point], pose: Pose2) -> list[Point]:
    c, s = math.cos(pose[2]), math.sin(pose[2])
    out = []
    for x, y in world:
        dx, dy = x - pose[0], y - pose[1]
        out.append((c * dx + s * dy, -s * dx + c * dy))
    return out


class Hull(NamedTuple):
    """Convex hull, counter-clockwise; ``kind`` is 'polygon', 'segment' or 'point'."""

    vertices: tuple
    kind: str


def convex_hull(pts: Iterable[Sequence[float]]) -> Hull:
    """Andrew's monotone chain, collinear points dropped."""
    P = sorted(set((float(p[0]), float(p[1])) for p in pts))
    if not P:
        raise ValueError("convex hull of empty point set")
    if len(P) == 1:
        return Hull((P[0],), "point")

    def half(points):
        out: list[Point] = []
        for p in points:
            while len(out) >= 2 and cross(*out[-2], *out[-1], *p) <= 0.0:
                out.pop()
            out.append(p)
        return out

    lower = half(P)
    upper = half(reversed(P))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all collinear: extreme endpoints
        return Hull((P[0], P[-1]), "segment")
    return Hull(tuple(hull), "polygon")


def convex_polygons_overlap(
    a: Sequence[Point], b: Sequence[Point], margin: float = 0.0, strict: bool = False
) -> bool:
    """Separating-axis test for two convex polygons (either winding).

    ``strict`` asks whether the open interiors overlap (touching is not
    overlap); otherwise closed sets are tested and ``margin`` inflates the gap
    that still counts as contact.
    """
    for poly in (a, b):
        n = len(poly)
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            nx, ny = y0 - y1, x1 - x0
            L = math.hypot(nx, ny)
            if L == 0.0:
                continue
            nx /= L
            ny /= L
            amin = amax = a[0][0] * nx + a[0][1] * ny
            for x, y in a:
                d = x * nx + y * ny
                if d < amin:
                    amin = d
                elif d > amax:
                    amax = d
            bmin = bmax = b[0][0] * nx + b[0][1] * ny
            for x, y in b:
                d = x * nx + y * ny
                if d < bmin:
                    bmin = d
                elif d > bmax:
                    bmax = d
            if strict:
                if amax <= bmin + EPS or bmax <= amin + EPS:
                    return False
            elif amax < bmin - margin or bmax < amin - margin:
                return False
    return True


def polygon_segment_intersects(poly: Sequence[Point], p: Point, q: Point, margin: float = 0.0) -> bool:
    """Closed polygon (any simple polygon) against a closed segment."""
    n = len(poly)
    if margin > 0.0:
        for i in range(n):
            a, b = poly[i], poly[(i + 1) % n]
            if segment_segment_distance(a, b, p, q) <= margin:
                return True
    else:
        for i in range(n):
            if segments_intersect(poly[i], poly[(i + 1) % n], p, q):
                return True
    return point_in_polygon(p, poly)


def segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    if segments_intersect(a, b, c, d, 0.0):
        return 0.0
    return min(
        point_segment_distance(a, c, d),
        point_segment_distance(b, c, d),
        point_segment_distance(c, a, b),
        point_segment_distance(d, a, b),
    )
