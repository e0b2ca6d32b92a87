import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from seftpp.geometry import (
    AngleInterval,
    Polygon,
    Pose2,
    circular_contains,
    convex_hull,
    cross,
    footprint_at,
    footprint_inverse,
    point_in_polygon,
    polygon_segment_intersects,
    segments_intersect,
    wrap_2pi,
    wrap_to_pi,
)

angles = st.floats(-1e4, 1e4, allow_nan=False)


def test_wrap_to_pi_examples():
    assert wrap_to_pi(0.0) == 0.0
    assert wrap_to_pi(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_to_pi(-1.5 * math.pi) == pytest.approx(0.5 * math.pi)
    assert wrap_to_pi(-math.pi) == pytest.approx(math.pi)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_wrap_to_pi_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        wrap_to_pi(bad)


@given(angles)
def test_wrap_to_pi_range_and_congruence(a):
    r = wrap_to_pi(a)
    assert -math.pi < r <= math.pi
    k = (a - r) / (2 * math.pi)
    assert abs(k - round(k)) < 1e-9
    assert wrap_to_pi(r) == r


@given(angles)
def test_wrap_2pi_range(a):
    assert 0.0 <= wrap_2pi(a) < 2 * math.pi


def test_circular_contains_examples():
    assert circular_contains(AngleInterval(2.36, 3.93), 3.0)
    assert not circular_contains(AngleInterval(3.93, 5.50), 0.0)
    assert circular_contains(AngleInterval(-0.1, 0.1), 0.0)
    # an interval written beyond pi still contains the wrapped angle
    assert circular_contains(AngleInterval(3.93, 5.50), wrap_to_pi(4.5))


@given(angles, st.floats(1e-3, 2 * math.pi - 1e-3))
def test_interval_contains_its_endpoints(lo, w):
    iv = AngleInterval(lo, lo + w)
    assert circular_contains(iv, iv.lo)
    assert circular_contains(iv, iv.hi)
    assert iv.mid in iv


@pytest.mark.parametrize("lo,hi", [(1.0, 1.0), (0.0, 2 * math.pi), (0.0, math.inf)])
def test_degenerate_interval_rejected(lo, hi):
    with pytest.raises(ValueError):
        AngleInterval(lo, hi)


def test_interval_shrink():
    iv = AngleInterval(2.36, 3.93).shrink(0.1)
    assert iv.lo == pytest.approx(2.46)
    assert iv.width == pytest.approx(1.37)
    with pytest.raises(ValueError):
        AngleInterval(0.0, 0.1).shrink(0.05)


def test_footprint_examples():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert footprint_at(sq, Pose2(0, 0, 0)) == [(0, 0), (1, 0), (1, 1), (0, 1)]
    (p,) = footprint_at([(1, 0)], Pose2(0, 0, math.pi / 2))
    assert p == pytest.approx((0, 1), abs=1e-12)
    (p,) = footprint_at([(1, 0)], Pose2(2, 3, math.pi))
    assert p == pytest.approx((1, 3), abs=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-math.pi, math.pi))
def test_footprint_inverse_roundtrip(x, y, th):
    body = [(-1.0, -0.7), (1.0, -0.7), (1.0, 0.7), (-1.0, 0.7)]
    pose = Pose2(x, y, th)
    world = footprint_at(body, pose)
    back = footprint_inverse(world, pose)
    for a, b in zip(back, body):
        assert a == pytest.approx(b, abs=1e-9)
    # rigid motion keeps the orientation
    assert Polygon(world).area == pytest.approx(Polygon(body).area)


def test_polygon_validation():
    with pytest.raises(ValueError):
        Polygon([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])  # clockwise
    with pytest.raises(ValueError):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # bow tie
    assert Polygon([(0, 0), (1, 0), (0, 1)]).area == pytest.approx(0.5)


def test_convex_hull_examples():
    h = convex_hull([(0, 0), (1, 0), (0, 1), (0.2, 0.2)])
    assert h.kind == "polygon"
    assert set(h.vertices) == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}
    assert convex_hull([(0, 0)]) == (((0.0, 0.0),), "point")
    assert convex_hull([(0, 0), (0, 0)]).kind == "point"
    seg = convex_hull([(0, 0), (2, 2), (1, 1)])
    assert seg.kind == "segment" and set(seg.vertices) == {(0.0, 0.0), (2.0, 2.0)}
    with pytest.raises(ValueError):
        convex_hull([])


def brute_hull(pts):
    """Hull vertices by the all-pairs half-plane test: (p, q) is an edge iff every point is left of p->q."""
    verts = set()
    n = len(pts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            p, q = pts[i], pts[j]
            if all(cross(*p, *q, *r) > 0 or (r == p or r == q) for r in pts):
                verts.add(p)
                verts.add(q)
    return verts


def test_convex_hull_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(20):
        pts = [tuple(p) for p in rng.uniform(-10, 10, size=(100, 2)).tolist()]
        assert set(convex_hull(pts).vertices) == brute_hull(pts)


@given(st.lists(st.tuples(st.floats(-100, 100), st.floats(-100, 100)), min_size=3, max_size=40))
def test_convex_hull_is_convex_and_contains_points(pts):
    h = convex_hull(pts)
    if h.kind != "polygon":
        return
    v = h.vertices
    n = len(v)
    for i in range(n):
        assert cross(*v[i], *v[(i + 1) % n], *v[(i + 2) % n]) >= -1e-12
    for p in pts:
        for i in range(n):
            # every input point is on the inner side of each edge (scaled tolerance)
            a, b = v[i], v[(i + 1) % n]
            assert cross(*a, *b, *p) >= -1e-9 * (1 + math.dist(a, b) * 200)


def test_segment_predicates():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert segments_intersect((0, 0), (1, 0), (1, 0), (2, 5))  # touching
    assert not segments_intersect((0, 0), (1, 0), (0, 1), (1, 1))
    sq = [(0, 0), (2, 0), (2, 2), (0, 2)]
    assert point_in_polygon((1, 1), sq)
    assert not point_in_polygon((3, 1), sq)
    assert polygon_segment_intersects(sq, (-1, 1), (3, 1))
    assert polygon_segment_intersects(sq, (0.5, 0.5), (1, 1))  # inside
    assert not polygon_segment_intersects(sq, (3, 3), (4, 4))
    assert polygon_segment_intersects(sq, (2.05, 0), (2.05, 1), margin=0.1)
