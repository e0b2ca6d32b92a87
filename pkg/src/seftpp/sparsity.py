"""Closed-form monotonicity tests for the relative angle and the tether length.

Over one primitive with an unchanged contact set the tether runs straight from
the last contact ``o`` to the anchor ``s``. Along an arc the anchor circles the
pivot, so the derivatives of Phi and of |o - s| reduce to a constant plus a
single cosine in the arc parameter ``t``. Checking the sign of that expression
over the parameter interval decides monotonicity without sampling.

Arc parameter convention: ``t`` is the signed central angle, in (0, t_max)
when driving forward and (-t_max, 0) when reversing. Right-pivot arcs (FR and
BL) have heading theta0 - t, left-pivot arcs (FL and BR) theta0 + t. For a
straight primitive ``t`` is the signed distance travelled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import TWO_PI, AngleInterval, Point, Pose2, wrap_2pi
from .primitives import MotionPrimitive, PathType

MARGIN = 1e-9


@dataclass(frozen=True)
class SparsityContext:
    p0: Pose2
    offset: tuple
    o: Point
    primitive: MotionPrimitive

    @property
    def interval(self) -> tuple[float, float]:
        T = self.primitive.t_max
        return (0.0, T) if self.primitive.dir > 0 else (-T, 0.0)


@dataclass(frozen=True)
class MonotonicityVerdict:
    guaranteed: bool
    branch: str = "none"  # 'increasing' / 'decreasing' (in t), 'constant' or 'none'


NOT_GUARANTEED = MonotonicityVerdict(False, "none")


def cos_range_open(a: float, b: float) -> tuple[float, float]:
    """(min, max) of cos over (a, b), endpoint values used as bounds."""
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b or b - a >= TWO_PI + 1e-9:
        raise ValueError(f"invalid interval ({a}, {b})")
    ca, cb = math.cos(a), math.cos(b)
    # any multiple of 2 pi strictly inside?
    k = math.floor(a / TWO_PI) + 1
    cmax = 1.0 if k * TWO_PI < b else max(ca, cb)
    k = math.floor((a - math.pi) / TWO_PI) + 1
    cmin = -1.0 if k * TWO_PI + math.pi < b else min(ca, cb)
    return cmin, cmax


# path kinematics in the t parameterisation ------------------------------

def _right(m: MotionPrimitive) -> bool:
    return m.dir * m.kappa < 0


def pose_t(ctx: SparsityContext, t: float) -> tuple[float, float, float]:
    x0, y0, th0 = ctx.p0
    m = ctx.primitive
    if m.kappa == 0.0:
        return x0 + t * math.cos(th0), y0 + t * math.sin(th0), th0
    R = m.radius
    if _right(m):
        return (
            x0 + R * math.sin(th0) - R * math.sin(th0 - t),
            y0 - R * math.cos(th0) + R * math.cos(th0 - t),
            th0 - t,
        )
    return (
        x0 - R * math.sin(th0) + R * math.sin(th0 + t),
        y0 + R * math.cos(th0) - R * math.cos(th0 + t),
        th0 + t,
    )


def anchor_t(ctx: SparsityContext, t: float) -> tuple[float, float, float]:
    x, y, th = pose_t(ctx, t)
    dx, dy = ctx.offset
    c, s = math.cos(th), math.sin(th)
    return x + dx * c - dy * s, y + dx * s + dy * c, th


def phi_t(ctx: SparsityContext, t: float) -> float:
    """Relative angle at t, not wrapped."""
    sx, sy, th = anchor_t(ctx, t)
    return math.atan2(ctx.o[1] - sy, ctx.o[0] - sx) - th


def span_t(ctx: SparsityContext, t: float) -> float:
    sx, sy, _ = anchor_t(ctx, t)
    return math.hypot(ctx.o[0] - sx, ctx.o[1] - sy)


# closed forms --------------------------------------------------------------

def _pivot_offsets(ctx: SparsityContext) -> tuple[float, float]:
    """(A, B) = o - pivot."""
    # cached on the instance: several predicates reuse it
    v = ctx.__dict__.get("_ab")
    if v is None:
        v = ctx.__dict__["_ab"] = _pivot_offsets_raw(ctx)
    return v


def _pivot_offsets_raw(ctx: SparsityContext) -> tuple[float, float]:
    x0, y0, th0 = ctx.p0
    R = ctx.primitive.radius
    ox, oy = ctx.o
    if _right(ctx.primitive):
        return ox - x0 - R * math.sin(th0), oy - y0 + R * math.cos(th0)
    return ox - x0 + R * math.sin(th0), oy - y0 - R * math.cos(th0)


def sef_coefficients(ctx: SparsityContext) -> tuple[float, float, float, float]:
    """A, B, C, D of the relative-angle derivative for an arc."""
    v = ctx.__dict__.get("_sef")
    if v is None:
        v = ctx.__dict__["_sef"] = _sef_raw(ctx)
    return v


def _sef_raw(ctx: SparsityContext) -> tuple[float, float, float, float]:
    A, B = _pivot_offsets(ctx)
    R = ctx.primitive.radius
    dx, dy = ctx.offset
    if _right(ctx.primitive):
        C = A * dx + B * R + B * dy
        D = A * R + A * dy - B * dx
    else:
        C = A * dx - B * R + B * dy
        D = A * R - A * dy + B * dx
    return A, B, C, D


def tla_coefficients(ctx: SparsityContext) -> tuple[float, float, float, float]:
    """A, B, C, D of the tether-length derivative for an arc."""
    A, B = _pivot_offsets(ctx)
    R = ctx.primitive.radius
    dx, dy = ctx.offset
    if _right(ctx.primitive):
        C = B * dx - A * R - A * dy
        D = A * dx + B * R + B * dy
    else:
        C = A * dy - A * R - B * dx
        D = -(A * dx - B * R + B * dy)
    return A, B, C, D


def _straight_anchor0(ctx: SparsityContext) -> Point:
    x0, y0, th0 = ctx.p0
    dx, dy = ctx.offset
    c, s = math.cos(th0), math.sin(th0)
    return x0 + dx * c - dy * s, y0 + dx * s + dy * c


def straight_sef_rate(ctx: SparsityContext) -> float:
    th0 = ctx.p0[2]
    sx, sy = _straight_anchor0(ctx)
    return -math.sin(th0) * (ctx.o[0] - sx) + math.cos(th0) * (ctx.o[1] - sy)


def straight_tla_root(ctx: SparsityContext) -> float:
    """Parameter where the straight-path length derivative t - K vanishes."""
    x0, y0, th0 = ctx.p0
    return (ctx.o[0] - x0) * math.cos(th0) + (ctx.o[1] - y0) * math.sin(th0) - ctx.offset[0]


def analytic_derivative(ctx: SparsityContext, t: float) -> tuple[float, float]:
    """Positively scaled dPhi/dt and dL/dt at parameter t."""
    m = ctx.primitive
    if m.kappa == 0.0:
        return straight_sef_rate(ctx), t - straight_tla_root(ctx)
    th0 = ctx.p0[2]
    A, B, C, D = sef_coefficients(ctx)
    K, N = A * A + B * B, math.hypot(C, D)
    phi = math.atan2(D, C)
    _, _, Ct, Dt = tla_coefficients(ctx)
    Nt, phit = math.hypot(Ct, Dt), math.atan2(Dt, Ct)
    if _right(m):
        return K - N * math.cos(t - th0 - phi), Nt * math.cos(t - th0 - phit)
    return N * math.cos(t + th0 - phi) - K, Nt * math.cos(t + th0 + phit)


# predicates ---------------------------------------------------------------

def anchor_travel(ctx: SparsityContext) -> float:
    """Length of the anchor's path over the whole primitive."""
    m = ctx.primitive
    if m.kappa == 0.0:
        return m.dis
    dx, dy = ctx.offset
    return m.t_max * math.hypot(dx, dy - m.dir / m.kappa)


def anchor_path_distance(ctx: SparsityContext) -> float:
    """Smallest distance between o and the anchor over the whole primitive."""
    lo, hi = ctx.interval
    m = ctx.primitive
    ox, oy = ctx.o
    if m.kappa == 0.0:
        sx, sy = _straight_anchor0(ctx)
        h = (math.cos(ctx.p0[2]), math.sin(ctx.p0[2]))
        u = (ox - sx) * h[0] + (oy - sy) * h[1]
        u = min(hi, max(lo, u))
        return math.hypot(ox - sx - u * h[0], oy - sy - u * h[1])
    A, B = _pivot_offsets(ctx)
    cx, cy = ox - A, oy - B
    s0x, s0y, _ = anchor_t(ctx, 0.0)
    rho = math.hypot(s0x - cx, s0y - cy)
    d_end = min(span_t(ctx, lo), span_t(ctx, hi))
    if rho == 0.0:
        return math.hypot(A, B)
    # anchor angle about the pivot moves with the heading
    a0 = math.atan2(s0y - cy, s0x - cx)
    sgn = -1.0 if _right(m) else 1.0
    beta = math.atan2(B, A)
    if hi - lo >= TWO_PI:
        inside = True
    else:
        a_lo = a0 + sgn * lo
        a_hi = a0 + sgn * hi
        start, width = (a_lo, a_hi - a_lo) if a_hi >= a_lo else (a_hi, a_lo - a_hi)
        inside = wrap_2pi(beta - start) <= width
    if inside:
        return min(d_end, abs(rho - math.hypot(A, B)))
    return d_end


def is_rel_angle_monotonic(ctx: SparsityContext) -> MonotonicityVerdict:
    m = ctx.primitive
    lo, hi = ctx.interval
    if m.kappa == 0.0:
        rate = straight_sef_rate(ctx)
        scale = max(1.0, abs(ctx.o[0]) + abs(ctx.o[1]) + abs(ctx.p0[0]) + abs(ctx.p0[1]))
        if abs(rate) > MARGIN * scale:
            return MonotonicityVerdict(True, "increasing" if rate > 0 else "decreasing")
        # o on the anchor line: Phi is constant unless the anchor passes through o
        if anchor_path_distance(ctx) > MARGIN * scale:
            return MonotonicityVerdict(True, "constant")
        return NOT_GUARANTEED
    if hi - lo >= TWO_PI:
        return NOT_GUARANTEED
    th0 = ctx.p0[2]
    A, B, C, D = sef_coefficients(ctx)
    K, N = A * A + B * B, math.hypot(C, D)
    eps = MARGIN * max(1.0, K)
    if N == 0.0:
        if K > 0.0:
            # constant-sign derivative
            return MonotonicityVerdict(True, "increasing" if _right(m) else "decreasing")
        return NOT_GUARANTEED
    phi = math.atan2(D, C)
    if _right(m):
        cmin, cmax = cos_range_open(lo - th0 - phi, hi - th0 - phi)
        # derivative = K - N cos
        if K - N * cmax > eps:
            return MonotonicityVerdict(True, "increasing")
        if K - N * cmin < -eps:
            return MonotonicityVerdict(True, "decreasing")
        return NOT_GUARANTEED
    cmin, cmax = cos_range_open(lo + th0 - phi, hi + th0 - phi)
    # derivative = N cos - K
    if N * cmin - K > eps:
        return MonotonicityVerdict(True, "increasing")
    if N * cmax - K < -eps:
        return MonotonicityVerdict(True, "decreasing")
    return NOT_GUARANTEED


def is_tether_len_monotonic(ctx: SparsityContext) -> MonotonicityVerdict:
    m = ctx.primitive
    lo, hi = ctx.interval
    if m.kappa == 0.0:
        K = straight_tla_root(ctx)
        if K < lo - MARGIN:
            return MonotonicityVerdict(True, "increasing")
        if K > hi + MARGIN:
            return MonotonicityVerdict(True, "decreasing")
        return NOT_GUARANTEED
    if hi - lo >= TWO_PI:
        return NOT_GUARANTEED
    th0 = ctx.p0[2]
    _, _, C, D = tla_coefficients(ctx)
    N = math.hypot(C, D)
    if N <= MARGIN:
        return NOT_GUARANTEED
    phi = math.atan2(D, C)
    if _right(m):
        cmin, cmax = cos_range_open(lo - th0 - phi, hi - th0 - phi)
    else:
        cmin, cmax = cos_range_open(lo + th0 + phi, hi + th0 + phi)
    if cmin > MARGIN:
        return MonotonicityVerdict(True, "increasing")
    if cmax < -MARGIN:
        return MonotonicityVerdict(True, "decreasing")
    return NOT_GUARANTEED


def sef_guaranteed(
    ctx: SparsityContext, interval: AngleInterval, phi_start: float, phi_end: float
) -> bool:
    """Endpoints inside ``interval`` plus monotone Phi keep every waypoint inside.

    Beyond the monotonicity verdict this demands that the anchor never meets
    ``o`` and that the swept angle stays below one turn, so the circular
    membership of the endpoints transfers to the whole path.
    """
    verdict = is_rel_angle_monotonic(ctx)
    if not verdict.guaranteed:
        return False
    m = ctx.primitive
    # distance from o to the start anchor minus how far the anchor can travel
    # is a cheap lower bound on the closest approach
    lower = span_t(ctx, 0.0) - anchor_travel(ctx)
    if m.kappa != 0.0:
        A, B, C, D = sef_coefficients(ctx)
        swing = m.t_max * (A * A + B * B + math.hypot(C, D))
        if not (lower > 1e-6 and swing < TWO_PI * lower * lower):
            dmin = anchor_path_distance(ctx)
            if dmin <= 1e-6 or swing >= TWO_PI * dmin * dmin:
                return False
    elif not lower > 1e-6 and anchor_path_distance(ctx) <= 1e-6:
        return False
    a0, a1 = interval.offset(phi_start), interval.offset(phi_end)
    if verdict.branch == "constant":
        return True
    # direction of travel in t relative to start -> end
    forward_t = m.dir > 0
    increasing = (verdict.branch == "increasing") == forward_t
    return a1 >= a0 if increasing else a1 <= a0


def tla_guaranteed(ctx: SparsityContext) -> bool:
    return is_tether_len_monotonic(ctx).guaranteed


__all__ = [
    "SparsityContext",
    "MonotonicityVerdict",
    "cos_range_open",
    "analytic_derivative",
    "is_rel_angle_monotonic",
    "is_tether_len_monotonic",
    "sef_guaranteed",
    "tla_guaranteed",
    "anchor_path_distance",
    "phi_t",
    "span_t",
    "PathType",
]
