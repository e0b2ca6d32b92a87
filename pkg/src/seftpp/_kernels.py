"""Compiled inner loops for tether geometry."""
import math

import numpy as np
from numba import njit

TAU = 2.0 * math.pi
HALF = 0.5 * math.pi


@njit(cache=True)
def wrap2pi(a):
    r = a - TAU * math.floor(a / TAU)
    if r >= TAU or r < 0.0:
        r = 0.0
    return r


@njit(cache=True)
def _quadrant_start(q):
    # bit0 (-,-), bit1 (+,-), bit2 (-,+), bit3 (+,+)
    if q == 0:
        return math.pi
    if q == 1:
        return 1.5 * math.pi
    if q == 2:
        return HALF
    return 0.0


@njit(cache=True)
def cone_hits(mask, s, w, eps):
    """Does an occupied quadrant of ``mask`` overlap the open cone (s, s + w)?"""
    for q in range(4):
        if mask & (1 << q):
            qa = _quadrant_start(q)
            if wrap2pi(qa - s) < w - eps or wrap2pi(s - qa) < HALF - eps:
                return True
    return False


@njit(cache=True)
def blocking_corners(CX, CY, MASK, PX, PY, EX, EY, eps, out, first_only):
    """Indices of corners whose obstacle pokes into the open convex polygon P.

    P is counter-clockwise. A corner strictly inside always blocks. A corner on
    the boundary blocks when one of its occupied quadrants overlaps the
    polygon's tangent cone there. Corners at the points (EX, EY) are ignored.
    """
    k = PX.shape[0]
    xmin = PX[0]
    xmax = PX[0]
    ymin = PY[0]
    ymax = PY[0]
    for e in range(1, k):
        xmin = min(xmin, PX[e])
        xmax = max(xmax, PX[e])
        ymin = min(ymin, PY[e])
        ymax = max(ymax, PY[e])
    n = 0
    for j in range(CX.shape[0]):
        x = CX[j]
        y = CY[j]
        if x < xmin - eps or x > xmax + eps or y < ymin - eps or y > ymax + eps:
            continue
        skip = False
        for q in range(EX.shape[0]):
            if abs(x - EX[q]) <= eps and abs(y - EY[q]) <= eps:
                skip = True
        if skip:
            continue
        inside = True
        nb = 0
        e_on = -1
        for e in range(k):
            e1 = e + 1
            if e1 == k:
                e1 = 0
            ex = PX[e1] - PX[e]
            ey = PY[e1] - PY[e]
            L = math.sqrt(ex * ex + ey * ey)
            d = (ex * (y - PY[e]) - ey * (x - PX[e])) / L
            if d < -eps:
                inside = False
                break
            if d <= eps:
                nb += 1
                e_on = e
        if not inside:
            continue
        hit = False
        if nb == 0:
            hit = True
        else:
            vi = -1
            for e in range(k):
                if abs(x - PX[e]) <= eps and abs(y - PY[e]) <= eps:
                    vi = e
            if vi >= 0:
                nx = vi + 1
                if nx == k:
                    nx = 0
                pv = vi - 1
                if pv < 0:
                    pv = k - 1
                s = math.atan2(PY[nx] - PY[vi], PX[nx] - PX[vi])
                w = wrap2pi(math.atan2(PY[pv] - PY[vi], PX[pv] - PX[vi]) - s)
            else:
                e1 = e_on + 1
                if e1 == k:
                    e1 = 0
                s = math.atan2(PY[e1] - PY[e_on], PX[e1] - PX[e_on])
                w = math.pi
            hit = cone_hits(MASK[j], s, w, eps)
        if hit:
            out[n] = j
            n += 1
            if first_only:
                return n
    return n


@njit(cache=True)
def triangle_blockers(CX, CY, MASK, ax, ay, vx, vy, cx, cy, eps, out):
    """Blocking corners of the open triangle (a, v, c), ignoring a and c."""
    z = (vx - ax) * (cy - ay) - (vy - ay) * (cx - ax)
    scale = max(1.0, abs(ax) + abs(ay) + abs(cx) + abs(cy))
    if abs(z) <= 1e-12 * scale * scale:
        return 0
    PX = np.empty(3)
    PY = np.empty(3)
    PX[0] = ax
    PY[0] = ay
    if z > 0:
        PX[1] = vx
        PY[1] = vy
        PX[2] = cx
        PY[2] = cy
    else:
        PX[1] = cx
        PY[1] = cy
        PX[2] = vx
        PY[2] = vy
    EX = np.empty(2)
    EY = np.empty(2)
    EX[0] = ax
    EY[0] = ay
    EX[1] = cx
    EY[1] = cy
    return blocking_corners(CX, CY, MASK, PX, PY, EX, EY, eps, out, False)


@njit(cache=True)
def hull_indices(xs, ys, out):
    """Monotone-chain convex hull, counter-clockwise, collinear points dropped."""
    n = xs.shape[0]
    order = np.argsort(ys, kind="mergesort")
    order = order[np.argsort(xs[order], kind="mergesort")]
    k = 0
    for ii in range(n):
        i = order[ii]
        while k >= 2:
            a = out[k - 2]
            b = out[k - 1]
            if (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]) <= 0.0:
                k -= 1
            else:
                break
        out[k] = i
        k += 1
    lower = k + 1
    for ii in range(n - 2, -1, -1):
        i = order[ii]
        while k >= lower:
            a = out[k - 2]
            b = out[k - 1]
            if (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]) <= 0.0:
                k -= 1
            else:
                break
        out[k] = i
        k += 1
    return k - 1


@njit(cache=True)
def region_blocked(CX, CY, MASK, xs, ys, eps):
    """Whether any obstacle overlaps the open interior of hull(xs, ys)."""
    idx = np.empty(2 * xs.shape[0] + 1, dtype=np.int64)
    k = hull_indices(xs, ys, idx)
    if k < 3:
        return False
    PX = np.empty(k)
    PY = np.empty(k)
    for i in range(k):
        PX[i] = xs[idx[i]]
        PY[i] = ys[idx[i]]
    EX = np.empty(0)
    EY = np.empty(0)
    out = np.empty(1, dtype=np.int64)
    return blocking_corners(CX, CY, MASK, PX, PY, EX, EY, eps, out, True) > 0


@njit(cache=True)
def corner_holds(mask, px, py, ox, oy, SX, SY, eps):
    """o's obstacle pokes into the open wedge (prev, o, s) for every sample s."""
    ap = math.atan2(py - oy, px - ox)
    for i in range(SX.shape[0]):
        a_s = math.atan2(SY[i] - oy, SX[i] - ox)
        d = wrap2pi(a_s - ap)
        if d < math.pi:
            s = ap
            w = d
        else:
            s = a_s
            w = TAU - d
        if w >= math.pi - eps or w <= eps:
            return False
        if not cone_hits(mask, s, w, eps):
            return False
    return True


@njit(cache=True)
def placed_samples(AX, AY, x0, y0, c, s, sx, sy, ox, oy):
    """Anchor samples placed at pose (x0, y0, c, s), first one pinned to (sx, sy),
    with o appended as the last point."""
    n = AX.shape[0]
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    for i in range(n):
        xs[i] = x0 + c * AX[i] - s * AY[i]
        ys[i] = y0 + s * AX[i] + c * AY[i]
    xs[0] = sx
    ys[0] = sy
    xs[n] = ox
    ys[n] = oy
    return xs, ys
