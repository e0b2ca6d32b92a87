"""Constant-curvature motion primitives.

Heading evolves as theta(tau) = theta0 + kappa * tau over arc length tau, and
the position moves along ``dir`` times the heading. A positive curvature turns
the heading counter-clockwise whichever way the robot drives, so a backward
left-curving primitive retraces a forward right-turning one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Pose2, wrap_to_pi


class PathType(Enum):
    STRAIGHT = "Straight"
    FR = "FR"
    FL = "FL"
    BR = "BR"
    BL = "BL"


@dataclass(frozen=True)
class MotionPrimitive:
    kappa: float
    dir: int
    dis: float

    def __post_init__(self):
        if self.dir not in (1, -1):
            raise ValueError("dir must be +1 or -1")
        if not (self.dis > 0 and math.isfinite(self.dis)):
            raise ValueError("dis must be positive")
        if not math.isfinite(self.kappa):
            raise ValueError("kappa must be finite")

    @property
    def is_straight(self) -> bool:
        return self.kappa == 0.0

    @property
    def radius(self) -> float:
        return math.inf if self.kappa == 0.0 else 1.0 / abs(self.kappa)

    @property
    def t_max(self) -> float:
        return self.dis if self.kappa == 0.0 else self.dis * abs(self.kappa)

    @property
    def path_type(self) -> PathType:
        if self.kappa == 0.0:
            return PathType.STRAIGHT
        if self.dir > 0:
            return PathType.FL if self.kappa > 0 else PathType.FR
        return PathType.BL if self.kappa > 0 else PathType.BR

    @property
    def pivots_right(self) -> bool:
        """Pivot on the robot's right: FR and BL."""
        return self.dir * self.kappa < 0

    def inverse(self) -> "MotionPrimitive":
        """The primitive that retraces this one from its endpoint (FR <-> BL, FL <-> BR)."""
        return MotionPrimitive(-self.kappa, -self.dir, self.dis)

    def with_length(self, dis: float) -> "MotionPrimitive":
        return MotionPrimitive(self.kappa, self.dir, dis)


def default_primitives(kappa_max: float, dis: float) -> list[MotionPrimitive]:
    return [
        MotionPrimitive(k, d, dis)
        for d in (1, -1)
        for k in (0.0, kappa_max, -kappa_max)
    ]


def pose_at(p0: Pose2, m: MotionPrimitive, tau: float) -> Pose2:
    """Pose after arc length ``tau`` (0 <= tau <= dis); theta left unwrapped."""
    x0, y0, th0 = p0
    k = m.kappa
    if k == 0.0:
        d = m.dir * tau
        return Pose2(x0 + d * math.cos(th0), y0 + d * math.sin(th0), th0)
    th = th0 + k * tau
    f = m.dir / k
    return Pose2(
        x0 + f * (math.sin(th) - math.sin(th0)),
        y0 - f * (math.cos(th) - math.cos(th0)),
        th,
    )


def pivot(p0: Pose2, m: MotionPrimitive) -> tuple[float, float]:
    f = m.dir / m.kappa
    return (p0[0] - f * math.sin(p0[2]), p0[1] + f * math.cos(p0[2]))


def endpoint_pose(p0: Pose2, m: MotionPrimitive) -> Pose2:
    x, y, th = pose_at(p0, m, m.dis)
    return Pose2(x, y, wrap_to_pi(th))


def sample_params(dis: float, step: float) -> list[float]:
    """Arc-length parameters 0, step, 2 step, ..., with ``dis`` always last."""
    if not step > 0:
        raise ValueError("step must be positive")
    n = max(1, math.ceil(dis / step - 1e-9))
    return [min(i * step, dis) for i in range(n)] + [dis]


def sample_poses(p0: Pose2, m: MotionPrimitive, step: float) -> list[Pose2]:
    out = []
    for tau in sample_params(m.dis, step):
        x, y, th = pose_at(p0, m, tau)
        out.append(Pose2(x, y, wrap_to_pi(th)))
    return out


def anchor_speed(m: MotionPrimitive, offset: tuple[float, float]) -> float:
    """Anchor displacement per unit arc length (constant along a primitive)."""
    if m.kappa == 0.0:
        return 1.0
    dx, dy = offset
    # anchor rotates about the pivot at distance |(dx, dy) - pivot|
    py = m.dir / m.kappa
    return abs(m.kappa) * math.hypot(dx, dy - py)


def tether_params(m: MotionPrimitive, waypoint_params: list[float], offset, max_step: float = 0.1) -> list[float]:
    """Refine waypoint parameters so the anchor moves at most ``max_step`` per update.

    Returns the refined list; waypoint parameters appear in it verbatim.
    """
    v = anchor_speed(m, offset)
    out = [waypoint_params[0]]
    for a, b in zip(waypoint_params, waypoint_params[1:]):
        n = max(1, math.ceil((b - a) * v / max_step - 1e-9))
        for j in range(1, n):
            out.append(a + (b - a) * j / n)
        out.append(b)
    return out
