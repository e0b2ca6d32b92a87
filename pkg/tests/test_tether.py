import math

import numpy as np
import pytest

from seftpp.geometry import AngleInterval, Pose2, footprint_at
from seftpp.homotopy import Ray, polyline_word
from seftpp.scenario import DEFAULT_FOOTPRINT
from seftpp.tether import (
    Config,
    TetherError,
    TetherState,
    TetherWorld,
    anchor_position,
    is_non_selfcrossing,
    is_sef,
    relative_angle,
    tether_length,
)
from seftpp.worldmodel import extract_obstacles, shortest_grid_path

from scenes import free_point, random_anchor_walk, random_rects, rect_map


def test_anchor_position_examples():
    assert anchor_position((0, 0, 0), (-1, 0)) == pytest.approx((-1, 0))
    assert anchor_position((0, 0, math.pi / 2), (-1, 0)) == pytest.approx((0, -1))
    assert anchor_position((2, 3, math.pi), (0.5, 0.2)) == pytest.approx((1.5, 2.8))


def test_tauten_straight_in_empty_map():
    w = TetherWorld(rect_map(10, []))
    t = w.tauten_polyline([(1.5, 1.5), (4.5, 2.5), (8.5, 3.5)])
    assert t.contacts == ()


# block x in [3, 6], y in [3, 6]
BLOCK = rect_map(10, [(3, 6, 3, 6)])


def test_tauten_single_bend():
    w = TetherWorld(BLOCK)
    t = w.tauten_polyline([(1.5, 4.5), (1.5, 7.5), (5.5, 7.5)])
    assert t.vertices() == ((3.0, 6.0),)
    # the tether goes clockwise round the corner
    assert t.contacts[0][1] == -1
    assert tether_length(t, (5.5, 7.5)) == pytest.approx(math.hypot(1.5, 1.5) + math.hypot(2.5, 1.5))


def test_tauten_rejects_polyline_through_obstacle():
    with pytest.raises(TetherError):
        TetherWorld(BLOCK).tauten_polyline([(1.5, 4.5), (7.5, 4.5)])


def test_tauten_never_lengthens_grid_paths():
    rng = np.random.default_rng(11)
    for _ in range(40):
        m = rect_map(20, random_rects(rng, 20, 4))
        w = TetherWorld(m)
        a, b = free_point(rng, m, 0), free_point(rng, m, 0)
        path = shortest_grid_path(m, a, b)
        t = w.tauten_polyline(path)
        poly_len = sum(math.dist(p, q) for p, q in zip(path, path[1:]))
        assert tether_length(t, path[-1]) <= poly_len + 1e-9


def test_advance_empty_map_keeps_straight():
    w = TetherWorld(rect_map(20, []))
    t = TetherState((2.5, 2.5))
    s = (4.0, 4.0)
    for p in [(10.0, 4.0), (15.0, 15.0), (3.0, 17.0)]:
        t = w.advance(t, s, p)
        s = p
        assert t.contacts == ()


def test_advance_push_then_pop():
    w = TetherWorld(BLOCK)
    b = (1.5, 4.5)
    t0 = w.tauten_polyline([b, (1.5, 7.5)])
    assert t0.contacts == ()
    out = [(1.5 + 0.05 * k, 7.5) for k in range(1, 81)]
    t1 = w.follow(t0, [(1.5, 7.5)] + out)
    assert t1.vertices() == ((3.0, 6.0),)
    back = out[::-1] + [(1.5, 7.5)]
    t2 = w.follow(t1, back)
    assert t2 == t0


def test_tether_length_examples():
    t = TetherState((0.0, 0.0), (((3.0, 0.0), 1),))
    assert tether_length(t, (3.0, 4.0)) == 7.0
    assert tether_length(t, (6.0, 4.0)) == 8.0
    assert tether_length(TetherState((0.0, 0.0)), (0.0, 0.0)) == 0.0


def test_tether_length_matches_naive_sum():
    rng = np.random.default_rng(5)
    for _ in range(500):
        pts = [tuple(p) for p in rng.uniform(-50, 50, size=(int(rng.integers(1, 8)), 2)).tolist()]
        s = tuple(rng.uniform(-50, 50, 2).tolist())
        t = TetherState(pts[0], tuple((p, 1) for p in pts[1:]))
        total = 0.0
        chain = pts + [s]
        for i in range(len(chain) - 1):
            total += math.sqrt((chain[i + 1][0] - chain[i][0]) ** 2 + (chain[i + 1][1] - chain[i][1]) ** 2)
        assert abs(tether_length(t, s) - total) <= 1e-12 * max(1.0, total)


def test_relative_angle_examples():
    t = TetherState((1.0, 1.0))
    assert relative_angle((0, 0, 0), (0, 0), t) == pytest.approx(math.pi / 4)
    assert relative_angle((0, 0, math.pi / 4), (0, 0), t) == pytest.approx(0.0)
    assert abs(relative_angle((0, 0, 0), (0, 0), TetherState((-3.0, 0.0)))) == pytest.approx(math.pi)
    with pytest.raises(TetherError):
        relative_angle((1, 1, 0), (0, 0), t)


def test_relative_angle_matches_complex_form():
    rng = np.random.default_rng(9)
    n = 10_000
    x, y, ox, oy = rng.uniform(-30, 30, (4, n))
    th = rng.uniform(-math.pi, math.pi, n)
    dx, dy = rng.uniform(-1.5, 1.5, (2, n))
    s = (x + 1j * y) + (dx + 1j * dy) * np.exp(1j * th)
    ref = np.angle(((ox + 1j * oy) - s) * np.exp(-1j * th))
    for i in range(n):
        got = relative_angle((x[i], y[i], th[i]), (dx[i], dy[i]), TetherState((ox[i], oy[i])))
        d = math.remainder(got - ref[i], 2 * math.pi)
        assert abs(d) < 1e-12


def test_is_sef_examples():
    # phi = 3.0 in the rear-facing interval
    pose = Pose2(0.0, 0.0, 0.0)
    cfg = Config(pose, TetherState((math.cos(3.0), math.sin(3.0))))
    assert is_sef(cfg, (0, 0), AngleInterval(2.36, 3.93))
    cfg = Config(pose, TetherState((1.0, 0.0)))
    assert not is_sef(cfg, (0, 0), AngleInterval(0.51, 1.11))
    lo = 2.36
    cfg = Config(pose, TetherState((math.cos(lo), math.sin(lo))))
    assert is_sef(cfg, (0, 0), AngleInterval(lo, 3.93))


def test_non_selfcrossing_examples():
    t = TetherState((0.0, 0.0))
    assert is_non_selfcrossing([footprint_at(DEFAULT_FOOTPRINT, (5, 5, 0))], t)
    t = TetherState((0.0, 0.0), (((10.0, 0.0), 1),))
    assert not is_non_selfcrossing([footprint_at(DEFAULT_FOOTPRINT, (5, 0, 0.3))], t)
    assert is_non_selfcrossing([footprint_at(DEFAULT_FOOTPRINT, (5, 3, 0.3))], t)


def _sampled_crossing(fp, pts, h=1e-4):
    """Any point sampled along the static tether inside the convex footprint."""
    fp = np.asarray(fp)
    nxt = np.roll(fp, -1, axis=0)
    for a, b in zip(pts, pts[1:]):
        n = max(2, int(math.dist(a, b) / h) + 1)
        u = np.linspace(0.0, 1.0, n)
        px = a[0] + u * (b[0] - a[0])
        py = a[1] + u * (b[1] - a[1])
        cr = (nxt[:, 0, None] - fp[:, 0, None]) * (py - fp[:, 1, None]) - (nxt[:, 1, None] - fp[:, 1, None]) * (px - fp[:, 0, None])
        if (cr >= 0).all(axis=0).any():
            return True
    return False


def test_non_selfcrossing_matches_sampling_oracle():
    rng = np.random.default_rng(21)
    for _ in range(400):
        k = int(rng.integers(1, 4))
        pts = [tuple(p) for p in rng.uniform(0, 10, size=(k + 1, 2)).tolist()]
        t = TetherState(pts[0], tuple((p, 1) for p in pts[1:]))
        pose = (rng.uniform(0, 10), rng.uniform(0, 10), rng.uniform(-math.pi, math.pi))
        fp = footprint_at(DEFAULT_FOOTPRINT, pose)
        assert is_non_selfcrossing([fp], t) == (not _sampled_crossing(fp, pts))


def test_length_continuous_along_walks():
    rng = np.random.default_rng(4)
    step = 0.1
    for _ in range(20):
        m = rect_map(25, random_rects(rng, 25, 5))
        w = TetherWorld(m)
        b = free_point(rng, m, 0)
        start = free_point(rng, m, 0)
        t = w.tauten_polyline(shortest_grid_path(m, b, start) + [start])
        chain = t.points + [start]
        prev = tether_length(t, start)
        for p in random_anchor_walk(rng, m, start, legs=5, step=step)[1:]:
            w.advance_chain(chain, p)
            cur = tether_length(w.state_of_chain(chain), p)
            assert abs(cur - prev) <= 3 * step
            prev = cur


def test_homotopy_consistency():
    rng = np.random.default_rng(8)
    for rects in ([(8, 12, 8, 12)], [(5, 8, 6, 10), (12, 15, 9, 13)]):
        m = rect_map(20, rects)
        w = TetherWorld(m)
        rays = [Ray(o.id, *o.representative) for o in extract_obstacles(m)]
        b, p, q = (1.5, 10.5), (3.5, 3.5), (17.5, 16.5)
        t0 = w.tauten_polyline(shortest_grid_path(m, b, p) + [p])
        finals = {}
        for _ in range(40):
            vias = [free_point(rng, m, 0) for _ in range(int(rng.integers(1, 3)))]
            route = [p] + vias + [q]
            dense = [p]
            for a, c in zip(route, route[1:]):
                n = max(1, math.ceil(math.dist(a, c) / 0.05))
                dense += [(a[0] + (c[0] - a[0]) * k / n, a[1] + (c[1] - a[1]) * k / n) for k in range(1, n + 1)]
            if any(m.occupied(*m.cell_of(v)) for v in dense):
                continue
            word = polyline_word(dense, rays).letters
            state = w.follow(t0, dense)
            finals.setdefault(word, set()).add(state.contacts)
        # several homotopy classes were visited, each with a single tether
        assert len(finals) >= 2
        for states in finals.values():
            assert len(states) == 1
