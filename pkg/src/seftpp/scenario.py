"""Scenario definition and TOML loading."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .geometry import TWO_PI, AngleInterval, Polygon, Pose2, footprint_at, wrap_to_pi
from .homotopy import Ray
from .primitives import MotionPrimitive, default_primitives
from .tether import (
    TetherState,
    TetherWorld,
    anchor_position,
    is_non_selfcrossing,
    relative_angle,
    tether_length,
)
from .worldmodel import GridMap, NoPath, clearance_map, extract_obstacles, is_footprint_free, load_grid, shortest_grid_path

DEFAULT_FOOTPRINT = ((-1.0, -0.7), (1.0, -0.7), (1.0, 0.7), (-1.0, 0.7))


class ScenarioError(ValueError):
    def __init__(self, field_name: str, msg: str):
        self.field = field_name
        super().__init__(f"{field_name}: {msg}")


@dataclass(frozen=True)
class Scenario:
    map: GridMap
    base: tuple
    start_pose: Pose2
    goal: tuple
    max_tether_length: float
    anchor_offset: tuple
    footprint: Polygon
    sef_interval: AngleInterval
    x_res: float = 1.0
    y_res: float = 1.0
    theta_bins: int = 72
    primitives: tuple = ()
    cost_weights: tuple = (1.0, 0.5, 1.0)
    goal_tolerance: float | None = None
    waypoint_resolution: float = 0.1
    base_occupied: bool = True
    sef_margin: float = 0.02
    max_expansions: int | None = None
    name: str = "scenario"

    def __post_init__(self):
        if not self.max_tether_length > 0:
            raise ScenarioError("max_tether_length", "must be positive")
        k1, k2, k3 = self.cost_weights
        if not (k1 > 0 and k2 >= 0 and k3 >= 0):
            raise ScenarioError("cost_weights", "need k1 > 0 and k2, k3 >= 0")
        if not (self.x_res > 0 and self.y_res > 0 and self.theta_bins >= 1):
            raise ScenarioError("resolution", "resolutions must be positive")
        if not self.waypoint_resolution > 0:
            raise ScenarioError("waypoint_resolution", "must be positive")
        if not self.primitives:
            raise ScenarioError("primitives", "primitive set is empty")
        if self.goal_tolerance is not None and not self.goal_tolerance >= 0:
            raise ScenarioError("goal_tolerance", "must be non-negative")
        if not 0 <= self.sef_margin < 0.5 * self.sef_interval.width:
            raise ScenarioError("sef_margin", "must be smaller than half the interval")

    @property
    def theta_res(self) -> float:
        return TWO_PI / self.theta_bins

    @property
    def tolerance(self) -> float:
        if self.goal_tolerance is not None:
            return self.goal_tolerance
        return 0.5 * min(self.x_res, self.y_res)

    @cached_property
    def collision_map(self) -> GridMap:
        return self.map.with_cell(self.base, True) if self.base_occupied else self.map

    @cached_property
    def clearance(self):
        return clearance_map(self.collision_map)

    @cached_property
    def tether_world(self) -> TetherWorld:
        return TetherWorld(self.map)

    @cached_property
    def obstacles(self):
        return extract_obstacles(self.map)

    @cached_property
    def rays(self) -> tuple:
        return tuple(Ray(ob.id, ob.representative[0], ob.representative[1]) for ob in self.obstacles)

    def with_(self, **kw) -> "Scenario":
        return replace(self, **kw)

    def initial_tether(self, pose: Pose2 | None = None) -> TetherState:
        pose = self.start_pose if pose is None else pose
        s = anchor_position(pose, self.anchor_offset)
        path = shortest_grid_path(self.map, self.base, s)
        path[0] = tuple(self.base)
        if len(path) == 1:
            path.append(s)
        else:
            path[-1] = s
        return self.tether_world.tauten_polyline(path)

    def check_start(self) -> list[str]:
        """Names of the validity conditions the start configuration violates."""
        bad = []
        fp = footprint_at(self.footprint, self.start_pose)
        if not is_footprint_free(self.collision_map, fp):
            bad.append("collision")
        try:
            t = self.initial_tether()
        except NoPath:
            return bad + ["tether"]
        s = anchor_position(self.start_pose, self.anchor_offset)
        if tether_length(t, s) > self.max_tether_length:
            bad.append("TLA")
        if not is_non_selfcrossing([fp], t):
            bad.append("NS")
        try:
            phi = relative_angle(self.start_pose, self.anchor_offset, t)
            if phi not in self.sef_interval:
                bad.append("SEF")
        except ValueError:
            bad.append("SEF")
        return bad


def initial_heading(sc: Scenario, xy, iters: int = 30) -> float:
    """Heading that puts the relative angle at the middle of the interval."""
    mid = sc.sef_interval.mid
    x, y = xy
    # first guess: face away from the base so the tether direction is mid
    th = math.atan2(sc.base[1] - y, sc.base[0] - x) - mid
    for _ in range(iters):
        pose = Pose2(x, y, wrap_to_pi(th))
        t = sc.initial_tether(pose)
        s = anchor_position(pose, sc.anchor_offset)
        o = t.last
        new = wrap_to_pi(math.atan2(o[1] - s[1], o[0] - s[0]) - mid)
        if abs(wrap_to_pi(new - th)) < 1e-12:
            th = new
            break
        th = new
    return wrap_to_pi(th)


# loading -------------------------------------------------------------------

def _num(d: dict, key: str, where: str, default=None) -> float:
    if key not in d:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{where}.{key}", f"expected a number, got {v!r}")
    return float(v)


def _pair(d: dict, key: str, where: str, default=None) -> tuple:
    if key not in d:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "missing")
        return default
    v = d[key]
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v)
    ):
        raise ScenarioError(f"{where}.{key}", f"expected [x, y], got {v!r}")
    return (float(v[0]), float(v[1]))


def _table(doc: dict, key: str) -> dict:
    v = doc.get(key, {})
    if not isinstance(v, dict):
        raise ScenarioError(key, "expected a table")
    return v


def scenario_from_dict(doc: dict, base_dir: Path | None = None, name: str = "scenario") -> Scenario:
    mp = _table(doc, "map")
    robot = _table(doc, "robot")
    task = _table(doc, "task")
    search = _table(doc, "search")

    fmt = mp.get("format", "ascii")
    res = _num(mp, "resolution", "map", 1.0)
    try:
        if "grid" in mp:
            grid = load_grid(mp["grid"], "ascii", res)
        elif "file" in mp:
            p = Path(mp["file"])
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            grid = load_grid(p.read_bytes(), fmt, res)
        else:
            raise ScenarioError("map.file", "missing (or give map.grid inline)")
    except OSError as e:
        raise ScenarioError("map.file", str(e)) from None
    except ValueError as e:
        if isinstance(e, ScenarioError):
            raise
        raise ScenarioError("map", str(e)) from None

    try:
        fp = Polygon(robot.get("footprint", DEFAULT_FOOTPRINT))
    except (ValueError, TypeError, IndexError) as e:
        raise ScenarioError("robot.footprint", str(e)) from None
    offset = _pair(robot, "anchor_offset", "robot")
    kmax = _num(robot, "kappa_max", "robot", 1.0 / 3.0)
    iv = robot.get("sef_interval")
    if not isinstance(iv, (list, tuple)) or len(iv) != 2:
        raise ScenarioError("robot.sef_interval", "expected [lo, hi]")
    try:
        interval = AngleInterval(float(iv[0]), float(iv[1]))
    except (ValueError, TypeError) as e:
        raise ScenarioError("robot.sef_interval", str(e)) from None

    base = _pair(task, "base", "task")
    start = _pair(task, "start", "task")
    goal = _pair(task, "goal", "task")
    L = _num(task, "max_tether_length", "task")
    tol = task.get("goal_tolerance")
    if tol is not None:
        tol = _num(task, "goal_tolerance", "task")

    dis = _num(search, "primitive_length", "search", 1.0)
    if dis <= 0:
        raise ScenarioError("search.primitive_length", "must be positive")
    if "primitives" in search:
        try:
            prims = tuple(MotionPrimitive(float(k), int(d), dis) for k, d in search["primitives"])
        except (ValueError, TypeError) as e:
            raise ScenarioError("search.primitives", str(e)) from None
    else:
        prims = tuple(default_primitives(kmax, dis))
    xr, yr = _pair(search, "resolution", "search", (1.0, 1.0))
    nth = search.get("theta_bins", 72)
    if not isinstance(nth, int) or nth < 1:
        raise ScenarioError("search.theta_bins", "expected a positive integer")
    w = search.get("cost_weights", [1.0, 0.5, 1.0])
    if not isinstance(w, (list, tuple)) or len(w) != 3:
        raise ScenarioError("search.cost_weights", "expected [k1, k2, k3]")
    wp = _num(search, "waypoint_resolution", "search", 0.1)
    margin = _num(search, "sef_margin", "search", 0.02)
    maxexp = search.get("max_expansions")

    kw: dict[str, Any] = dict(
        map=grid,
        base=base,
        start_pose=Pose2(start[0], start[1], 0.0),
        goal=goal,
        max_tether_length=L,
        anchor_offset=offset,
        footprint=fp,
        sef_interval=interval,
        x_res=xr,
        y_res=yr,
        theta_bins=nth,
        primitives=prims,
        cost_weights=tuple(float(v) for v in w),
        goal_tolerance=tol,
        waypoint_resolution=wp,
        base_occupied=bool(mp.get("base_occupied", True)),
        sef_margin=margin,
        max_expansions=maxexp,
        name=str(doc.get("name", name)),
    )
    try:
        sc = Scenario(**kw)
    except ScenarioError:
        raise
    heading = task.get("start_heading", "auto")
    if heading == "auto":
        try:
            th = initial_heading(sc, start)
        except NoPath:
            raise ScenarioError("task.start", "anchor not reachable from the base") from None
    else:
        th = wrap_to_pi(_num(task, "start_heading", "task"))
    return replace(sc, start_pose=Pose2(start[0], start[1], th))


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except OSError as e:
        raise ScenarioError("scenario", str(e)) from None
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError("scenario", f"TOML syntax: {e}") from None
    return scenario_from_dict(doc, path.parent, path.stem)


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package (case1, case2, case3)."""
    return Path(__file__).parent / "data" / f"{name}.toml"
