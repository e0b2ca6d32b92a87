"""Dense, planner-independent replay of a path against the four validity conditions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import Pose2, footprint_at, wrap_to_pi
from .scenario import Scenario
from .tether import anchor_position, is_non_selfcrossing
from .worldmodel import NoPath, is_footprint_free

CONDITIONS = ("collision", "TLA", "NS", "SEF")
# how far the reconstructed segment end may miss the recorded pose
JOIN_TOL = 1e-6


@dataclass
class ConditionResult:
    ok: bool = True
    param: float | None = None  # arc-length parameter of the first violation
    pose: tuple | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    conditions: dict = field(default_factory=lambda: {c: ConditionResult() for c in CONDITIONS})
    samples: int = 0
    length: float = 0.0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error and all(r.ok for r in self.conditions.values())

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    def fail(self, name: str, param: float, pose, detail: str) -> None:
        r = self.conditions[name]
        if r.ok:
            r.ok, r.param, r.pose, r.detail = False, param, tuple(pose), detail

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "samples": self.samples,
            "length": self.length,
            "error": self.error,
            "conditions": {
                k: {"ok": r.ok, "param": r.param, "pose": r.pose, "detail": r.detail}
                for k, r in self.conditions.items()
            },
        }

    def lines(self) -> list[str]:
        out = []
        for k, r in self.conditions.items():
            if r.ok:
                out.append(f"{k}: pass")
            else:
                out.append(f"{k}: FAIL at s={r.param:.4f} pose={tuple(round(v, 4) for v in r.pose)} {r.detail}")
        if self.error:
            out.append(f"error: {self.error}")
        return out


@dataclass(frozen=True)
class Segment:
    """Constant-curvature piece between two recorded poses.

    ``rs`` is the signed turning radius (dir / kappa); ``None`` marks a straight
    piece and 0 a spin in place.
    """

    p: Pose2
    dth: float
    rs: float | None
    dist: float  # signed travel for straight pieces

    def at(self, u: float) -> Pose2:
        x0, y0, th0 = self.p
        if self.rs is None:
            d = u * self.dist
            return Pose2(x0 + d * math.cos(th0), y0 + d * math.sin(th0), th0)
        th = th0 + u * self.dth
        return Pose2(
            x0 + self.rs * (math.sin(th) - math.sin(th0)),
            y0 - self.rs * (math.cos(th) - math.cos(th0)),
            th,
        )

    def sweep(self, rmax: float) -> float:
        """Upper bound on how far any body point travels."""
        if self.rs is None:
            return abs(self.dist)
        return (abs(self.rs) + rmax) * abs(self.dth)

    @property
    def length(self) -> float:
        if self.rs is None:
            return abs(self.dist)
        return abs(self.rs * self.dth)


def reconstruct(p: Pose2, q: Pose2) -> Segment:
    """Straight, arc or spin joining p to q; raises ValueError if none fits."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    c, s = math.cos(p[2]), math.sin(p[2])
    lx, ly = c * dx + s * dy, -s * dx + c * dy
    dth = wrap_to_pi(q[2] - p[2])
    if abs(dth) < 1e-9:
        seg = Segment(Pose2(*p), 0.0, None, lx)
    elif math.hypot(dx, dy) < 1e-12:
        seg = Segment(Pose2(*p), dth, 0.0, 0.0)
    else:
        a, b = math.sin(dth), 1.0 - math.cos(dth)
        seg = Segment(Pose2(*p), dth, (lx * a + ly * b) / (a * a + b * b), 0.0)
    e = seg.at(1.0)
    if math.hypot(e[0] - q[0], e[1] - q[1]) > JOIN_TOL:
        raise ValueError(f"no straight or circular piece joins {tuple(p)} to {tuple(q)}")
    return seg


def _poses_of(path) -> list[Pose2]:
    poses = getattr(path, "path", path)
    out = []
    for p in poses:
        if len(p) < 3 or (isinstance(p[2], float) and math.isnan(p[2])):
            continue  # the appended goal point
        out.append(Pose2(float(p[0]), float(p[1]), float(p[2])))
    return out


def replay(sc: Scenario, poses, step: float = 0.01):
    """Yield (arc-length parameter, pose, tether chain) densely along ``poses``.

    The chain is [b, contacts..., s] and is updated in place between yields.
    Raises ValueError when two poses cannot be joined and NoPath or
    TetherError when no initial tether exists.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    poses = _poses_of(poses)
    if not poses:
        return
    segs = [reconstruct(p, q) for p, q in zip(poses, poses[1:])]
    world = sc.tether_world
    t0 = sc.initial_tether(poses[0])
    chain = t0.points + [anchor_position(poses[0], sc.anchor_offset)]
    rmax = sc.footprint.max_radius()
    yield 0.0, poses[0], chain
    s_param = 0.0
    for seg in segs:
        n = max(1, math.ceil(seg.sweep(rmax) / step - 1e-9))
        for k in range(1, n + 1):
            pose = seg.at(k / n)
            world.advance_chain(chain, anchor_position(pose, sc.anchor_offset))
            yield s_param + seg.length * k / n, pose, chain
        s_param += seg.length


def validate_path(sc: Scenario, path, step: float = 0.01) -> ValidationReport:
    """Replay ``path`` (a PlanResult or a pose list) at spacing ``step``.

    A fresh tether is built at the first pose and advanced through every
    sample. The conditions are checked exactly, against the unshrunk interval
    and the full length limit.
    """
    rep = ValidationReport()
    if not _poses_of(path):
        rep.error = "empty path"
        return rep
    world = sc.tether_world
    iv = sc.sef_interval
    L = sc.max_tether_length
    try:
        for param, pose, chain in replay(sc, path, step):
            fp = footprint_at(sc.footprint, pose)
            if not is_footprint_free(sc.collision_map, fp):
                rep.fail("collision", param, pose, "footprint overlaps an occupied cell")
            length = sum(math.dist(chain[i], chain[i + 1]) for i in range(len(chain) - 1))
            if length > L + 1e-9:
                rep.fail("TLA", param, pose, f"length {length:.4f} > {L}")
            if not is_non_selfcrossing([fp], world.state_of_chain(chain)):
                rep.fail("NS", param, pose, "body crosses the static tether")
            o, s = chain[-2], chain[-1]
            if o == s:
                rep.fail("SEF", param, pose, "anchor on the last contact")
            else:
                phi = wrap_to_pi(math.atan2(o[1] - s[1], o[0] - s[0]) - pose[2])
                if phi not in iv:
                    rep.fail("SEF", param, pose, f"phi {phi:.4f} outside [{iv.lo}, {iv.hi}]")
            rep.samples += 1
            rep.length = param
    except ValueError as e:
        rep.error = str(e)
    except NoPath as e:
        rep.error = f"no initial tether: {e}"
    return rep
