"""Random maps and scenarios shared by the test modules."""
from __future__ import annotations

import math

import numpy as np

from seftpp.geometry import AngleInterval, Polygon, Pose2
from seftpp.primitives import default_primitives
from seftpp.scenario import DEFAULT_FOOTPRINT, Scenario, initial_heading
from seftpp.tether import segment_hits_obstacle
from seftpp.worldmodel import GridMap, NoPath

# anchor offset and admissible interval of the three robot layouts
CASES = {
    1: ((-1.0, 0.0), (2.36, 3.93)),
    2: ((0.0, -0.7), (3.93, 5.50)),
    3: ((0.0, 0.7), (0.51, 1.11)),
}

SMALL_FOOTPRINT = ((-0.5, -0.35), (0.5, -0.35), (0.5, 0.35), (-0.5, 0.35))


def rect_map(size, rects) -> GridMap:
    """Grid of ``size`` (int or (w, h)) with rectangles (c0, c1, r0, r1) filled, ends exclusive."""
    w, h = (size, size) if isinstance(size, int) else size
    occ = np.zeros((h, w), dtype=bool)
    for c0, c1, r0, r1 in rects:
        occ[r0:r1, c0:c1] = True
    return GridMap(occ)


def random_rects(rng, size, n, lo=2, hi=None, pad=1):
    """Up to n non-touching rectangles inside the map border."""
    hi = hi or max(lo + 1, size // 6)
    out = []
    for _ in range(200 * n):
        if len(out) == n:
            break
        w, h = rng.integers(lo, hi + 1, size=2)
        c0 = int(rng.integers(pad, size - w - pad + 1))
        r0 = int(rng.integers(pad, size - h - pad + 1))
        r = (c0, c0 + int(w), r0, r0 + int(h))
        # keep one free cell between obstacles so they stay separate
        if all(r[1] + 1 < q[0] or q[1] + 1 < r[0] or r[3] + 1 < q[2] or q[3] + 1 < r[2] for q in out):
            out.append(r)
    return out


def free_point(rng, m: GridMap, clearance=1.5, avoid=()):
    """Random cell centre whose surrounding box of half-width ``clearance`` is free."""
    for _ in range(2000):
        col = int(rng.integers(0, m.width))
        row = int(rng.integers(0, m.height))
        x, y = col + 0.5, row + 0.5
        c = int(math.ceil(clearance))
        if any(m.occupied(col + dc, row + dr) for dc in range(-c, c + 1) for dr in range(-c, c + 1)):
            continue
        if any(math.dist((x, y), a) < d for a, d in avoid):
            continue
        return (x, y)
    raise RuntimeError("no free point found")


def make_scenario(m: GridMap, base, start, goal, case=1, **kw) -> Scenario:
    """Scenario with the start heading chosen so the tether sits mid-interval."""
    offset, (lo, hi) = CASES[case]
    args = dict(
        map=m,
        base=tuple(base),
        start_pose=Pose2(start[0], start[1], 0.0),
        goal=tuple(goal),
        max_tether_length=kw.pop("max_tether_length", 80.0),
        anchor_offset=offset,
        footprint=Polygon(kw.pop("footprint", DEFAULT_FOOTPRINT)),
        sef_interval=AngleInterval(lo, hi),
        primitives=tuple(default_primitives(kw.pop("kappa", 0.15), kw.pop("dis", 1.0))),
        goal_tolerance=kw.pop("goal_tolerance", 1.0),
    )
    args.update(kw)
    sc = Scenario(**args)
    th = initial_heading(sc, start)
    return sc.with_(start_pose=Pose2(start[0], start[1], th))


def random_scenario(rng, size, n_obs, case, goal_range=(6.0, 18.0), **kw):
    """A scenario with a valid start, or None when the draw is unusable."""
    m = rect_map(size, random_rects(rng, size, n_obs))
    try:
        base = free_point(rng, m, 1.0)
        start = free_point(rng, m, 2.0, avoid=[(base, 4.0)])
        for _ in range(50):
            goal = free_point(rng, m, 1.0)
            if goal_range[0] <= math.dist(start, goal) <= goal_range[1]:
                break
        else:
            return None
        sc = make_scenario(m, base, start, goal, case, **kw)
    except (RuntimeError, NoPath):
        return None
    if sc.check_start():
        return None
    return sc


def random_anchor_walk(rng, m: GridMap, start, legs=6, step=0.1, max_leg=6.0):
    """Dense polyline of straight legs that never enter an occupied cell."""
    pts = [tuple(start)]
    cur = tuple(start)
    for _ in range(legs):
        for _ in range(100):
            ang = rng.uniform(-math.pi, math.pi)
            d = rng.uniform(0.5, max_leg)
            nxt = (cur[0] + d * math.cos(ang), cur[1] + d * math.sin(ang))
            if not (0.5 < nxt[0] < m.width - 0.5 and 0.5 < nxt[1] < m.height - 0.5):
                continue
            if m.occupied(*m.cell_of(nxt)) or segment_hits_obstacle(m, cur, nxt):
                continue
            break
        else:
            continue
        n = max(1, math.ceil(math.dist(cur, nxt) / step))
        for k in range(1, n + 1):
            pts.append((cur[0] + (nxt[0] - cur[0]) * k / n, cur[1] + (nxt[1] - cur[1]) * k / n))
        cur = nxt
    return pts
