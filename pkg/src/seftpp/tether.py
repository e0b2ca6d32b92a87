"""Taut tether model.

The tether is a taut string from the base ``b`` to the anchor ``s`` that bends
only at convex obstacle corners. Both whole-polyline tautening and incremental
updates run the same local rubber-band rule: a bend vertex ``v`` between
neighbours ``a`` and ``c`` is kept only while obstacle material pokes into the
open triangle (a, v, c); otherwise it is replaced by the convex chain that
wraps the blocking corners (possibly none, i.e. a straight shortcut). Running
this to a fixpoint yields the shortest path in the same homotopy class, so the
incremental and global procedures agree exactly on grid-corner contacts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K

from .geometry import (
    EPS,
    AngleInterval,
    Point,
    Pose2,
    circular_contains,
    convex_hull,
    cross,
    polygon_segment_intersects,
    wrap_to_pi,
)
from .worldmodel import GridMap

MAX_TETHER_STEP = 0.1


class TetherError(ValueError):
    pass


@dataclass(frozen=True)
class TetherState:
    base: Point
    contacts: tuple = ()

    @property
    def last(self) -> Point:
        return self.contacts[-1][0] if self.contacts else self.base

    @property
    def points(self) -> list[Point]:
        """Static part of the tether: b, then every contact up to o."""
        return [self.base] + [c[0] for c in self.contacts]

    @property
    def static_length(self) -> float:
        pts = self.points
        return sum(math.dist(pts[i], pts[i + 1]) for i in range(len(pts) - 1))

    def vertices(self) -> tuple:
        return tuple(c[0] for c in self.contacts)


@dataclass(frozen=True)
class Config:
    pose: Pose2
    tether: TetherState


def anchor_position(pose: Sequence[float], offset: Sequence[float]) -> Point:
    c, s = math.cos(pose[2]), math.sin(pose[2])
    dx, dy = offset
    return (pose[0] + dx * c - dy * s, pose[1] + dx * s + dy * c)


def tether_length(t: TetherState, s: Point) -> float:
    return t.static_length + math.dist(t.last, s)


def relative_angle(pose: Sequence[float], offset: Sequence[float], t: TetherState) -> float:
    sx, sy = anchor_position(pose, offset)
    ox, oy = t.last
    if ox == sx and oy == sy:
        raise TetherError("anchor coincides with the last contact")
    return wrap_to_pi(math.atan2(oy - sy, ox - sx) - pose[2])


def is_sef(cfg: Config, offset, interval: AngleInterval) -> bool:
    return circular_contains(interval, relative_angle(cfg.pose, offset, cfg.tether))


def is_non_selfcrossing(footprints: Iterable[Sequence[Point]], t: TetherState, margin: float = 0.0) -> bool:
    pts = t.points
    if len(pts) < 2:
        return True
    segs = list(zip(pts, pts[1:]))
    for fp in footprints:
        xs = [p[0] for p in fp]
        ys = [p[1] for p in fp]
        x0, x1, y0, y1 = min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin
        for p, q in segs:
            if max(p[0], q[0]) < x0 or min(p[0], q[0]) > x1 or max(p[1], q[1]) < y0 or min(p[1], q[1]) > y1:
                continue
            if polygon_segment_intersects(fp, p, q, margin):
                return False
    return True


def _turn(a: Point, v: Point, c: Point) -> int:
    z = cross(a[0], a[1], v[0], v[1], c[0], c[1])
    return 1 if z > 0 else (-1 if z < 0 else 0)


class TetherWorld:
    """Corner set and occupancy used for tether geometry."""

    def __init__(self, grid: GridMap):
        self.grid = grid
        occ = grid.occupancy
        H, W = occ.shape
        P = np.ones((H + 2, W + 2), dtype=bool)
        P[1:-1, 1:-1] = occ
        q0 = P[:-1, :-1]  # cell (i-1, j-1)
        q1 = P[:-1, 1:]   # cell (i, j-1)
        q2 = P[1:, :-1]   # cell (i-1, j)
        q3 = P[1:, 1:]    # cell (i, j)
        cnt = q0.astype(np.int8) + q1 + q2 + q3
        convex = (cnt == 1) | ((cnt == 2) & ((q0 & q3) | (q1 & q2)))
        js, is_ = np.nonzero(convex)
        r = grid.resolution
        self.cx = (is_ * r).astype(np.float64)
        self.cy = (js * r).astype(np.float64)
        mask = (
            q0[js, is_].astype(np.int64)
            | (q1[js, is_].astype(np.int64) << 1)
            | (q2[js, is_].astype(np.int64) << 2)
            | (q3[js, is_].astype(np.int64) << 3)
        )
        self.mask = mask
        self._mask_of = dict(zip(zip(self.cx.tolist(), self.cy.tolist()), mask.tolist()))
        self._out = np.empty(max(1, len(self.cx)), dtype=np.int64)

    @property
    def corners(self) -> list[Point]:
        return list(zip(self.cx.tolist(), self.cy.tolist()))

    def blocking(self, poly: Sequence[Point], exclude: Sequence[Point] = ()) -> list[Point]:
        """Corners whose obstacle overlaps the open interior of a convex CCW polygon."""
        px = np.array([p[0] for p in poly], dtype=np.float64)
        py = np.array([p[1] for p in poly], dtype=np.float64)
        ex = np.array([p[0] for p in exclude], dtype=np.float64)
        ey = np.array([p[1] for p in exclude], dtype=np.float64)
        n = K.blocking_corners(self.cx, self.cy, self.mask, px, py, ex, ey, EPS, self._out, False)
        idx = self._out[:n]
        return list(zip(self.cx[idx].tolist(), self.cy[idx].tolist()))

    def triangle_blockers(self, a: Point, v: Point, c: Point) -> list[Point]:
        n = K.triangle_blockers(self.cx, self.cy, self.mask, a[0], a[1], v[0], v[1], c[0], c[1], EPS, self._out)
        if n == 0:
            return []
        idx = self._out[:n]
        return list(zip(self.cx[idx].tolist(), self.cy[idx].tolist()))

    def region_free(self, pts: Sequence[Point]) -> bool:
        """Open interior of hull(pts) overlaps no obstacle."""
        P = np.asarray(pts, dtype=np.float64)
        return not K.region_blocked(self.cx, self.cy, self.mask, P[:, 0].copy(), P[:, 1].copy(), EPS)

    def region_free_xy(self, xs: np.ndarray, ys: np.ndarray) -> bool:
        return not K.region_blocked(self.cx, self.cy, self.mask, xs, ys, EPS)

    def corner_holds(self, prev: Point, o: Point, samples: Sequence[Point]) -> bool:
        """Contact ``o`` stays wrapped for every anchor position in ``samples``.

        Holds when o's obstacle pokes into the open wedge (prev, o, s) for each
        sample s, which is exactly when the relaxation keeps o.
        """
        m = self._mask_of.get(o)
        if m is None:
            return False
        S = np.asarray(samples, dtype=np.float64)
        return self.corner_holds_xy(prev, o, S[:, 0].copy(), S[:, 1].copy())

    def corner_holds_xy(self, prev: Point, o: Point, xs: np.ndarray, ys: np.ndarray) -> bool:
        m = self._mask_of.get(o)
        if m is None:
            return False
        return K.corner_holds(m, prev[0], prev[1], o[0], o[1], xs, ys, EPS)

    # rubber band --------------------------------------------------------

    def _relax(self, chain: list, i: int) -> None:
        budget = 100000
        while i < len(chain) - 1:
            if i < 1:
                i = 1
                continue
            budget -= 1
            if budget < 0:
                raise TetherError("tether relaxation did not converge")
            a, v, c = chain[i - 1], chain[i], chain[i + 1]
            kept = self.triangle_blockers(a, v, c)
            if not kept:
                del chain[i]
                i -= 1
                continue
            if len(kept) == 1 and kept[0] == v:
                i += 1
                continue
            new = _wrap_chain(a, v, c, kept)
            if new == [v]:
                i += 1
                continue
            chain[i:i + 1] = new
            i -= 1

    def _state(self, chain: list) -> TetherState:
        contacts = tuple(
            (chain[i], _turn(chain[i - 1], chain[i], chain[i + 1]))
            for i in range(1, len(chain) - 1)
        )
        return TetherState(chain[0], contacts)

    def tauten_polyline(self, polyline: Sequence[Sequence[float]]) -> TetherState:
        chain = [(float(p[0]), float(p[1])) for p in polyline]
        if not chain:
            raise TetherError("empty polyline")
        for p, q in zip(chain, chain[1:]):
            if segment_hits_obstacle(self.grid, p, q):
                raise TetherError(f"polyline segment {p}->{q} crosses an obstacle")
        # collapse repeated points
        dedup = [chain[0]]
        for p in chain[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        if len(dedup) == 1:
            return TetherState(dedup[0], ())
        self._relax(dedup, 1)
        return self._state(dedup)

    def advance(self, t: TetherState, s_from: Point, s_to: Point) -> TetherState:
        chain = t.points + [tuple(s_from)]
        self.advance_chain(chain, s_to)
        return self._state(chain)

    def advance_chain(self, chain: list, s_to: Point) -> None:
        """In-place update of [b, contacts..., s] to a new anchor position."""
        s_from = chain[-1]
        d = math.dist(s_from, s_to)
        n = max(1, math.ceil(d / MAX_TETHER_STEP - 1e-9))
        for k in range(1, n + 1):
            if k == n:
                p = (float(s_to[0]), float(s_to[1]))
            else:
                f = k / n
                p = (s_from[0] + f * (s_to[0] - s_from[0]), s_from[1] + f * (s_to[1] - s_from[1]))
            if p == chain[-1]:
                continue
            chain.append(p)
            self._relax(chain, len(chain) - 2)

    def state_of_chain(self, chain: list) -> TetherState:
        return self._state(chain)

    def follow(self, t: TetherState, anchor_path: Sequence[Point]) -> TetherState:
        chain = t.points + [tuple(anchor_path[0])]
        for p in anchor_path[1:]:
            self.advance_chain(chain, p)
        return self._state(chain)


def _wrap_chain(a: Point, v: Point, c: Point, kept: list) -> list:
    """Interior vertices of the convex chain from a to c around ``kept``, on v's side."""
    hull = convex_hull([a, c] + kept)
    if hull.kind != "polygon":
        return []
    hv = list(hull.vertices)
    ia, ic = hv.index(a), hv.index(c)
    n = len(hv)
    fwd = []
    i = (ia + 1) % n
    while i != ic:
        fwd.append(hv[i])
        i = (i + 1) % n
    bwd = []
    i = (ia - 1) % n
    while i != ic:
        bwd.append(hv[i])
        i = (i - 1) % n
    side = _turn(a, c, v)
    for path in (fwd, bwd):
        if path and _turn(a, c, path[0]) == side:
            return path
    return []


def segment_hits_obstacle(m: GridMap, p: Point, q: Point) -> bool:
    """True if the segment passes through the open interior of an occupied cell."""
    r = m.resolution
    c0 = int(math.floor(min(p[0], q[0]) / r))
    c1 = int(math.floor(max(p[0], q[0]) / r))
    r0 = int(math.floor(min(p[1], q[1]) / r))
    r1 = int(math.floor(max(p[1], q[1]) / r))
    dx, dy = q[0] - p[0], q[1] - p[1]
    for row in range(r0, r1 + 1):
        for col in range(c0, c1 + 1):
            if not m.occupied(col, row):
                continue
            # Liang-Barsky clip against the open cell
            lo, hi = 0.0, 1.0
            ok = True
            for pd, q0, q1 in ((dx, p[0] - col * r, (col + 1) * r - p[0]), (dy, p[1] - row * r, (row + 1) * r - p[1])):
                if abs(pd) < 1e-15:
                    if q0 <= EPS or q1 <= EPS:
                        ok = False
                        break
                    continue
                t0, t1 = -q0 / pd, q1 / pd
                if t0 > t1:
                    t0, t1 = t1, t0
                lo, hi = max(lo, t0), min(hi, t1)
            if ok and (hi - lo) * math.hypot(dx, dy) > EPS:
                return True
    return False
