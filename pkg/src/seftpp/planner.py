"""Best-first search over motion primitives with tether constraints.

Two expansion strategies share everything except how a primitive's
intermediate waypoints are validated:

* ``normal`` simulates the tether through every waypoint;
* ``improved`` first tests whether the contact set provably stays put. If it
  does, the endpoint tether is known without simulation, the endpoint is
  checked, and the waypoint loop is skipped when both the relative angle and
  the tether length are monotone along the primitive.

Both strategies accept exactly the same primitives, so plans are identical.
"""
from __future__ import annotations

import bisect
import heapq
import math
import time

import numpy as np
from dataclasses import dataclass, field

from .geometry import Pose2, point_segment_distance, wrap_2pi, wrap_to_pi
from .homotopy import EMPTY, HWord, append_reduce, polyline_crossings
from ._kernels import placed_samples
from .primitives import MotionPrimitive, anchor_speed, pose_at, sample_params, tether_params
from .scenario import Scenario
from .sparsity import SparsityContext, sef_guaranteed, tla_guaranteed
from .tether import MAX_TETHER_STEP, TetherState, anchor_position, is_non_selfcrossing
from .worldmodel import NoPath, is_footprint_free

HWORD_STEP = 0.1


class InvalidStart(ValueError):
    def __init__(self, conditions):
        self.conditions = list(conditions)
        super().__init__("start configuration violates: " + ", ".join(self.conditions))


class PlanFailure(NoPath):
    def __init__(self, msg: str, stats: "PlanStats"):
        super().__init__(msg)
        self.stats = stats


@dataclass
class PlanStats:
    expanded: int = 0
    generated: int = 0
    guaranteed_primitives: int = 0
    checked_primitives: int = 0
    wall_time_ms: float = 0.0

    def as_dict(self) -> dict:
        return {
            "expanded": self.expanded,
            "generated": self.generated,
            "guaranteed_primitives": self.guaranteed_primitives,
            "checked_primitives": self.checked_primitives,
            "wall_time_ms": self.wall_time_ms,
        }

    @property
    def guaranteed_fraction(self) -> float:
        n = self.guaranteed_primitives + self.checked_primitives
        return self.guaranteed_primitives / n if n else 0.0


class Node:
    __slots__ = ("id", "pose", "tether", "s", "phi", "h", "g", "hcost", "parent", "prim", "alive", "key")

    def __init__(self, id, pose, tether, s, phi, h, g, hcost, parent, prim):
        self.id = id
        self.pose = pose
        self.tether = tether
        self.s = s
        self.phi = phi
        self.h = h
        self.g = g
        self.hcost = hcost
        self.parent = parent
        self.prim = prim
        self.alive = True
        self.key = None

    @property
    def steer(self) -> float:
        return self.prim.kappa if self.prim else 0.0

    @property
    def dir(self) -> int:
        return self.prim.dir if self.prim else 0

    def __repr__(self):
        return f"Node({self.id}, {tuple(round(v, 3) for v in self.pose)}, g={self.g:.3f}, h={self.h})"


@dataclass
class PlanResult:
    path: list
    goal: tuple
    segments: list
    stats: PlanStats
    cost: float
    nodes: list = field(repr=False, default_factory=list)
    strategy: str = "normal"

    def poses(self) -> list:
        return self.path[:-1]


class _Prim:
    """Per-primitive data expressed relative to the start pose."""

    def __init__(self, m: MotionPrimitive, sc: Scenario):
        self.m = m
        origin = Pose2(0.0, 0.0, 0.0)
        wp = sample_params(m.dis, sc.waypoint_resolution)
        tp = tether_params(m, wp, sc.anchor_offset, MAX_TETHER_STEP)
        wset = set(wp)
        self.is_wp = [t in wset for t in tp]
        self.wp_rel = [pose_at(origin, m, t) for t in wp]
        body = list(sc.footprint)
        self.fp_rel = []
        self.ctr_rel = [(x, y) for x, y, _ in self.wp_rel[1:]]
        for x, y, th in self.wp_rel[1:]:
            c, s = math.cos(th), math.sin(th)
            self.fp_rel.append([(x + c * bx - s * by, y + s * bx + c * by) for bx, by in body])
        self.tp_rel = []
        for t in tp:
            x, y, th = pose_at(origin, m, t)
            self.tp_rel.append((anchor_position((x, y, th), sc.anchor_offset), th))
        self.ax = np.array([a[0] for a, _ in self.tp_rel])
        self.ay = np.array([a[1] for a, _ in self.tp_rel])
        self.h_rel = [pose_at(origin, m, t)[:2] for t in sample_params(m.dis, HWORD_STEP)]
        self.end_rel = self.wp_rel[-1]
        step = sc.waypoint_resolution
        rmax = sc.footprint.max_radius()
        self.coll_margin = 0.5 * min(step, m.dis) * (1.0 + abs(m.kappa) * rmax)
        # clearance that makes the exact footprint test unnecessary
        self.safe_clearance = rmax + self.coll_margin + math.sqrt(2.0) * sc.map.resolution
        # disc around the chord midpoint holding every swept footprint
        ex, ey = self.wp_rel[-1][0], self.wp_rel[-1][1]
        self.disc_ctr = (0.5 * ex, 0.5 * ey)
        reach = max(math.dist(self.disc_ctr, p) for p in self.ctr_rel)
        self.h_reach = max(math.dist(self.disc_ctr, p) for p in self.h_rel)
        self.disc_r = reach + rmax + self.coll_margin
        self.disc_safe = self.disc_r + math.sqrt(2.0) * sc.map.resolution
        self.tla_margin = 0.5 * min(step, m.dis) * anchor_speed(m, sc.anchor_offset)


def _xf(x0, y0, c, s, p):
    return (x0 + c * p[0] - s * p[1], y0 + s * p[0] + c * p[1])


def _static_len(pts) -> float:
    total = 0.0
    for i in range(len(pts) - 1):
        total += math.dist(pts[i], pts[i + 1])
    return total


def _polyline_far(pts, p, r) -> bool:
    """Every segment of the polyline stays farther than r from p."""
    for a, b in zip(pts, pts[1:]):
        if point_segment_distance(p, a, b) <= r:
            return False
    return True


class Planner:
    def __init__(self, scenario: Scenario, expansion: str = "normal"):
        if expansion not in ("normal", "improved"):
            raise ValueError("expansion must be 'normal' or 'improved'")
        self.sc = scenario
        self.mode = expansion
        self.prims = [_Prim(m, scenario) for m in scenario.primitives]
        self.world = scenario.tether_world
        self.cmap = scenario.collision_map
        self.clearance = scenario.clearance
        self.rays = scenario.rays
        self.ray_xs = sorted(r.x for r in self.rays)
        self.interval = scenario.sef_interval.shrink(scenario.sef_margin)
        self.L = scenario.max_tether_length
        self.offset = scenario.anchor_offset
        self.stats = PlanStats()
        self._next_id = 0

    # helpers ---------------------------------------------------------------

    def _new_id(self) -> int:
        i = self._next_id
        self._next_id += 1
        return i

    def bucket(self, pose) -> tuple:
        sc = self.sc
        return (
            math.floor(pose[0] / sc.x_res),
            math.floor(pose[1] / sc.y_res),
            int(wrap_2pi(pose[2]) / sc.theta_res) % sc.theta_bins,
        )

    def movement_cost(self, parent: Node, m: MotionPrimitive) -> float:
        k1, k2, k3 = self.sc.cost_weights
        if parent.prim is None:
            return parent.g + k1 * m.dis
        return parent.g + k1 * m.dis + k2 * abs(m.kappa - parent.prim.kappa) + k3 * abs(m.dir - parent.prim.dir)

    def heuristic(self, pose) -> float:
        return math.hypot(self.sc.goal[0] - pose[0], self.sc.goal[1] - pose[1])

    def _phi_ok(self, o, s, th) -> bool:
        if o[0] == s[0] and o[1] == s[1]:
            return False
        phi = math.atan2(o[1] - s[1], o[0] - s[0]) - th
        return self.interval.offset(phi) <= self.interval.width

    def root(self) -> Node:
        sc = self.sc
        bad = sc.check_start()
        if bad:
            raise InvalidStart(bad)
        t = sc.initial_tether()
        s = anchor_position(sc.start_pose, sc.anchor_offset)
        phi = wrap_to_pi(math.atan2(t.last[1] - s[1], t.last[0] - s[0]) - sc.start_pose[2])
        return Node(self._new_id(), sc.start_pose, t, s, phi, EMPTY, 0.0, self.heuristic(sc.start_pose), None, None)

    # expansion -------------------------------------------------------------

    def _swept_free(self, n: Node, P: _Prim, x0, y0, c, s) -> bool:
        cmap = self.cmap
        margin = P.coll_margin
        static = n.tether
        clr = self.clearance
        res = cmap.resolution
        H, W = clr.shape
        safe = P.safe_clearance
        dx, dy = _xf(x0, y0, c, s, P.disc_ctr)
        col, row = int(math.floor(dx / res)), int(math.floor(dy / res))
        coll_clear = 0 <= row < H and 0 <= col < W and clr[row, col] > P.disc_safe
        ns_clear = not static.contacts or _polyline_far(static.points, (dx, dy), P.disc_r)
        if coll_clear and ns_clear:
            return True
        for ctr, fp in zip(P.ctr_rel, P.fp_rel):
            world = None
            if not coll_clear:
                px, py = _xf(x0, y0, c, s, ctr)
                col, row = int(math.floor(px / res)), int(math.floor(py / res))
                if not (0 <= row < H and 0 <= col < W and clr[row, col] > safe):
                    world = [_xf(x0, y0, c, s, p) for p in fp]
                    if not is_footprint_free(cmap, world, margin):
                        return False
            if not ns_clear:
                if world is None:
                    world = [_xf(x0, y0, c, s, p) for p in fp]
                if not is_non_selfcrossing((world,), static, margin):
                    return False
        return True

    def _simulate(self, n: Node, P: _Prim, x0, y0, th0, c, s):
        """Tether simulation through all waypoints; (ok, chain) with early exit."""
        chain = n.tether.points + [n.s]
        world = self.world
        L = self.L - P.tla_margin
        for j in range(1, len(P.tp_rel)):
            a, dth = P.tp_rel[j]
            sp = _xf(x0, y0, c, s, a)
            world.advance_chain(chain, sp)
            if P.is_wp[j]:
                o = chain[-2]
                if not self._phi_ok(o, sp, th0 + dth):
                    return False, chain
                if _static_len(chain[:-1]) + math.dist(o, sp) > L:
                    return False, chain
        return True, chain

    def _contacts_fixed(self, t: TetherState, xs, ys) -> bool:
        """Contacts stay fixed while the anchor visits the samples.

        ``xs`` and ``ys`` hold the samples followed by o itself.
        """
        o = t.last
        if not self.world.region_free_xy(xs, ys):
            return False
        if t.contacts:
            prev = t.contacts[-2][0] if len(t.contacts) > 1 else t.base
            return self.world.corner_holds_xy(prev, o, xs[:-1], ys[:-1])
        return True

    def expand(self, n: Node) -> list[Node]:
        x0, y0, th0 = n.pose
        c, s = math.cos(th0), math.sin(th0)
        children = []
        improved = self.mode == "improved"
        stats = self.stats
        for P in self.prims:
            if not self._swept_free(n, P, x0, y0, c, s):
                continue
            ex, ey, eth = P.end_rel
            end_pose = Pose2(x0 + c * ex - s * ey, y0 + s * ex + c * ey, wrap_to_pi(th0 + eth))
            if not improved:
                stats.checked_primitives += 1
                ok, chain = self._simulate(n, P, x0, y0, th0, c, s)
                if not ok:
                    continue
                tether = n.tether if chain[1:-1] == n.tether.points[1:] else self.world.state_of_chain(chain)
                se = chain[-1]
            else:
                o = n.tether.last
                xs, ys = placed_samples(P.ax, P.ay, x0, y0, c, s, n.s[0], n.s[1], o[0], o[1])
                se = _xf(x0, y0, c, s, P.tp_rel[-1][0])
                if self._contacts_fixed(n.tether, xs, ys):
                    tether = n.tether
                    o = tether.last
                    L = self.L - P.tla_margin
                    lo = _static_len(tether.points)
                    if not self._phi_ok(o, se, th0 + eth) or lo + math.dist(o, se) > L:
                        stats.checked_primitives += 1
                        continue
                    ctx = SparsityContext(n.pose, self.offset, o, P.m)
                    phi_end = math.atan2(o[1] - se[1], o[0] - se[0]) - (th0 + eth)
                    if sef_guaranteed(ctx, self.interval, n.phi, phi_end) and tla_guaranteed(ctx):
                        stats.guaranteed_primitives += 1
                    else:
                        stats.checked_primitives += 1
                        bad = False
                        for j in range(1, len(P.tp_rel)):
                            if not P.is_wp[j]:
                                continue
                            sp = _xf(x0, y0, c, s, P.tp_rel[j][0])
                            if not self._phi_ok(o, sp, th0 + P.tp_rel[j][1]) or lo + math.dist(o, sp) > L:
                                bad = True
                                break
                        if bad:
                            continue
                else:
                    stats.checked_primitives += 1
                    ok, chain = self._simulate(n, P, x0, y0, th0, c, s)
                    if not ok:
                        continue
                    tether = n.tether if chain[1:-1] == n.tether.points[1:] else self.world.state_of_chain(chain)
            o = tether.last
            phi = wrap_to_pi(math.atan2(o[1] - se[1], o[0] - se[0]) - end_pose[2])
            h = n.h
            hx = x0 + c * P.disc_ctr[0] - s * P.disc_ctr[1]
            i = bisect.bisect_left(self.ray_xs, hx - P.h_reach)
            if i < len(self.ray_xs) and self.ray_xs[i] <= hx + P.h_reach:
                hpts = [_xf(x0, y0, c, s, p) for p in P.h_rel]
                h = append_reduce(n.h, polyline_crossings(hpts, self.rays))
            child = Node(
                self._new_id(), end_pose, tether, se, phi, h,
                self.movement_cost(n, P.m), self.heuristic(end_pose), n, P.m,
            )
            children.append(child)
        return children

    # search ----------------------------------------------------------------

    def goal_reached(self, n: Node) -> bool:
        return math.hypot(n.pose[0] - self.sc.goal[0], n.pose[1] - self.sc.goal[1]) <= self.sc.tolerance

    def goal_blocked(self) -> bool:
        """Every point within tolerance of the goal lies in an occupied cell."""
        m = self.cmap
        gx, gy = self.sc.goal
        tol = self.sc.tolerance
        r = m.resolution
        for row in range(math.floor((gy - tol) / r), math.floor((gy + tol) / r) + 1):
            for col in range(math.floor((gx - tol) / r), math.floor((gx + tol) / r) + 1):
                if m.occupied(col, row):
                    continue
                # nearest point of this free cell to the goal
                nx = min(max(gx, col * r), (col + 1) * r)
                ny = min(max(gy, row * r), (row + 1) * r)
                if math.hypot(nx - gx, ny - gy) <= tol:
                    return False
        return True

    def plan(self) -> PlanResult:
        t0 = time.perf_counter()
        stats = self.stats
        root = self.root()
        if self.goal_reached(root):
            stats.wall_time_ms = (time.perf_counter() - t0) * 1e3
            return self._result(root)
        if self.goal_blocked():
            stats.wall_time_ms = (time.perf_counter() - t0) * 1e3
            raise PlanFailure("goal lies inside an obstacle", stats)
        visited: dict = {}
        root.key = self.bucket(root.pose)
        visited[root.key] = {root.h.letters: root}
        queue = [(root.g + root.hcost, root.id, root)]
        budget = self.sc.max_expansions
        while queue:
            _, _, cur = heapq.heappop(queue)
            if not cur.alive:
                continue
            if self.goal_reached(cur):
                stats.wall_time_ms = (time.perf_counter() - t0) * 1e3
                return self._result(cur)
            if budget is not None and stats.expanded >= budget:
                break
            stats.expanded += 1
            for child in self.expand(cur):
                stats.generated += 1
                key = self.bucket(child.pose)
                child.key = key
                cell = visited.get(key)
                if cell is None:
                    visited[key] = {child.h.letters: child}
                else:
                    other = cell.get(child.h.letters)
                    if other is not None:
                        if child.g >= other.g:
                            continue
                        other.alive = False
                    cell[child.h.letters] = child
                heapq.heappush(queue, (child.g + child.hcost, child.id, child))
        stats.wall_time_ms = (time.perf_counter() - t0) * 1e3
        if budget is not None and stats.expanded >= budget:
            raise PlanFailure("expansion budget exhausted", stats)
        raise PlanFailure("search queue exhausted", stats)

    def _result(self, goal: Node) -> PlanResult:
        chain = []
        n = goal
        while n is not None:
            chain.append(n)
            n = n.parent
        chain.reverse()
        if chain[0].parent is not None or chain[0].prim is not None:
            raise RuntimeError("broken parent chain")
        path = trace_path(self.sc, [(nd.parent.pose, nd.prim) for nd in chain[1:]], chain[0].pose)
        segments = [(nd.parent.pose, nd.prim) for nd in chain[1:]]
        return PlanResult(path, tuple(self.sc.goal), segments, self.stats, goal.g, chain, self.mode)


def trace_path(sc: Scenario, segments, start: Pose2) -> list:
    """Root-to-goal poses at waypoint spacing with the goal point appended."""
    out = [Pose2(*start)]
    for p0, m in segments:
        x0, y0, th0 = p0
        c, s = math.cos(th0), math.sin(th0)
        for x, y, th in (pose_at(Pose2(0.0, 0.0, 0.0), m, t) for t in sample_params(m.dis, sc.waypoint_resolution)[1:]):
            out.append(Pose2(x0 + c * x - s * y, y0 + s * x + c * y, wrap_to_pi(th0 + th)))
    out.append(tuple(sc.goal))
    return out


def plan(scenario: Scenario, expansion: str = "normal") -> PlanResult:
    return Planner(scenario, expansion).plan()
