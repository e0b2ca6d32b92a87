"""Self-entanglement-free path planning for a tethered differential-drive robot."""
from .geometry import AngleInterval, Point2, Polygon, Pose2, circular_contains, convex_hull, footprint_at, wrap_to_pi
from .homotopy import HWord, Ray
from .planner import InvalidStart, PlanFailure, PlanResult, PlanStats, Planner, plan, trace_path
from .primitives import MotionPrimitive, PathType, default_primitives
from .scenario import Scenario, ScenarioError, bundled, initial_heading, load_scenario
from .tether import Config, TetherState, TetherWorld, relative_angle, tether_length
from .validate import ValidationReport, validate_path
from .worldmodel import GridMap, NoPath, extract_obstacles, load_grid

__all__ = [
    "AngleInterval",
    "Config",
    "GridMap",
    "HWord",
    "InvalidStart",
    "MotionPrimitive",
    "NoPath",
    "PathType",
    "PlanFailure",
    "PlanResult",
    "PlanStats",
    "Planner",
    "Point2",
    "Polygon",
    "Pose2",
    "Ray",
    "Scenario",
    "ScenarioError",
    "TetherState",
    "TetherWorld",
    "ValidationReport",
    "bundled",
    "circular_contains",
    "convex_hull",
    "default_primitives",
    "extract_obstacles",
    "footprint_at",
    "initial_heading",
    "load_grid",
    "load_scenario",
    "plan",
    "relative_angle",
    "tether_length",
    "trace_path",
    "validate_path",
    "wrap_to_pi",
]
