"""Occupancy grids, obstacle extraction, footprint collision and grid paths."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .geometry import Point, Polygon, point_in_polygon, segments_intersect, signed_area


class MapParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class NoPath(Exception):
    """Raised when no route exists."""


@dataclass(frozen=True, eq=False)
class GridMap:
    """Occupancy grid. ``occupancy[row, col]``, row 0 at y = 0 (bottom)."""

    occupancy: np.ndarray
    resolution: float = 1.0

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancy, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise ValueError("occupancy must be a non-empty 2-D array")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)

    @property
    def width(self) -> int:
        return self.occupancy.shape[1]

    @property
    def height(self) -> int:
        return self.occupancy.shape[0]

    def cell_of(self, p: Sequence[float]) -> tuple[int, int]:
        return int(math.floor(p[0] / self.resolution)), int(math.floor(p[1] / self.resolution))

    def occupied(self, col: int, row: int) -> bool:
        if 0 <= col < self.width and 0 <= row < self.height:
            return bool(self.occupancy[row, col])
        return True

    def cell_center(self, col: int, row: int) -> Point:
        r = self.resolution
        return ((col + 0.5) * r, (row + 0.5) * r)

    def with_cell(self, p: Sequence[float], value: bool = True) -> "GridMap":
        col, row = self.cell_of(p)
        occ = self.occupancy.copy()
        if 0 <= col < self.width and 0 <= row < self.height:
            occ[row, col] = value
        return GridMap(occ, self.resolution)

    def __eq__(self, other):
        return (
            isinstance(other, GridMap)
            and self.resolution == other.resolution
            and np.array_equal(self.occupancy, other.occupancy)
        )

    __hash__ = None


def load_grid(data: bytes | str, fmt: str = "ascii", resolution: float = 1.0) -> GridMap:
    """Parse an ascii grid ('W H' header, '#' occupied) or a P2/P5 pgm."""
    if fmt == "ascii":
        return _load_ascii(data, resolution)
    if fmt == "pgm":
        return _load_pgm(data if isinstance(data, bytes) else data.encode("latin-1"), resolution)
    raise ValueError(f"unknown map format {fmt!r}")


def _load_ascii(data: bytes | str, resolution: float) -> GridMap:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise MapParseError("empty map file, expected 'W H' header", 1)
    try:
        w, h = (int(v) for v in lines[0].split())
    except ValueError:
        raise MapParseError(f"bad header {lines[0]!r}, expected 'W H'", 1) from None
    if w < 1 or h < 1:
        raise MapParseError("width and height must be >= 1", 1)
    rows = [ln.rstrip("\r\n") for ln in lines[1:]]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != h:
        raise MapParseError(f"expected {h} rows, found {len(rows)}", len(lines))
    occ = np.zeros((h, w), dtype=bool)
    # file lists rows top-down; first data row is y = h - 1
    for i, row in enumerate(rows):
        if len(row) != w:
            raise MapParseError(f"expected {w} columns, found {len(row)}", i + 2)
        for j, ch in enumerate(row):
            if ch == "#":
                occ[h - 1 - i, j] = True
            elif ch != ".":
                raise MapParseError(f"unexpected character {ch!r}", i + 2)
    return GridMap(occ, resolution)


def _load_pgm(data: bytes, resolution: float) -> GridMap:
    if not data:
        raise MapParseError("empty pgm file", 1)
    tokens: list[tuple[bytes, int]] = []
    pos, line = 0, 1
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise MapParseError("pgm magic must be P2 or P5", 1)
    pos = 2
    # header: width, height, maxval, skipping comments
    while len(tokens) < 3:
        if pos >= len(data):
            raise MapParseError("truncated pgm header", line)
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            if c == b"\n":
                line += 1
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append((data[start:pos], line))
    try:
        w, h, maxval = (int(t) for t, _ in tokens)
    except ValueError:
        raise MapParseError("non-integer pgm header field", tokens[-1][1]) from None
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise MapParseError("invalid pgm dimensions", line)
    if magic == b"P5":
        pos += 1
        dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
        raw = np.frombuffer(data[pos:], dtype=dtype)
        if raw.size < w * h:
            raise MapParseError(f"expected {w * h} pixels, found {raw.size}", line)
        vals = raw[: w * h].astype(np.int64)
    else:
        try:
            vals = np.array([int(t) for t in data[pos:].split()], dtype=np.int64)
        except ValueError:
            raise MapParseError("non-integer pixel value", line) from None
        if vals.size != w * h:
            raise MapParseError(f"expected {w * h} pixels, found {vals.size}", line)
    img = vals.reshape(h, w)
    return GridMap(np.flipud(img < 128), resolution)


def dump_ascii(m: GridMap) -> str:
    rows = [f"{m.width} {m.height}"]
    for r in range(m.height - 1, -1, -1):
        rows.append("".join("#" if v else "." for v in m.occupancy[r]))
    return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class ObstaclePolygon:
    id: int
    boundary: Polygon
    representative: Point
    cells: tuple = field(repr=False, default=())

    @property
    def ray_x(self) -> float:
        return self.representative[0]


_FOUR = ndimage.generate_binary_structure(2, 1)


def extract_obstacles(m: GridMap) -> list[ObstaclePolygon]:
    """One polygon per 4-connected occupied component, ordered by representative."""
    labels, n = ndimage.label(m.occupancy, structure=_FOUR)
    comps = []
    for k in range(1, n + 1):
        rows, cols = np.nonzero(labels == k)
        cells = sorted(zip(cols.tolist(), rows.tolist()))
        comps.append(cells)
    # lexicographically smallest cell (by x then y) picks the representative
    comps.sort(key=lambda cells: cells[0])
    used_x: set[float] = set()
    out = []
    r = m.resolution
    for i, cells in enumerate(comps):
        col, row = cells[0]
        cx, cy = (col + 0.5) * r, (row + 0.5) * r
        x = cx
        k = 0
        while x in used_x:
            # +0.25, -0.25, +0.125, -0.125, ... stays inside the cell
            k += 1
            mag = 0.25 / (2 ** ((k - 1) // 2))
            x = cx + (mag if k % 2 else -mag) * r
        used_x.add(x)
        boundary = _trace_boundary(set(cells), r)
        out.append(ObstaclePolygon(i + 1, boundary, (x, cy), tuple(cells)))
    return out


def _trace_boundary(cells: set, r: float) -> Polygon:
    # directed edges with the component on the left, keyed by start corner
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        edges.setdefault(a, []).append(b)

    for c, rr in cells:
        if (c, rr - 1) not in cells:
            add((c, rr), (c + 1, rr))
        if (c + 1, rr) not in cells:
            add((c + 1, rr), (c + 1, rr + 1))
        if (c, rr + 1) not in cells:
            add((c + 1, rr + 1), (c, rr + 1))
        if (c - 1, rr) not in cells:
            add((c, rr + 1), (c, rr))
    loops = []
    while edges:
        start = min(edges)
        loop = [start]
        prev = None
        cur = start
        while True:
            outs = edges[cur]
            if len(outs) == 1:
                nxt = outs[0]
            else:
                # pinch corner: turn right so the free region on our right
                # stays the same and outline and hole never merge
                dx, dy = cur[0] - prev[0], cur[1] - prev[1]
                nxt = min(outs, key=lambda q: dx * (q[1] - cur[1]) - dy * (q[0] - cur[0]))
            outs.remove(nxt)
            if not outs:
                del edges[cur]
            prev, cur = cur, nxt
            if cur == start:
                break
            loop.append(cur)
        loops.append(loop)
    best = max(loops, key=lambda lp: signed_area(lp))
    # drop collinear vertices
    pts = []
    n = len(best)
    for i in range(n):
        a, b, c = best[i - 1], best[i], best[(i + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0:
            pts.append((b[0] * r, b[1] * r))
    return Polygon(pts)


def _cell_range(m: GridMap, xmin, xmax, ymin, ymax):
    r = m.resolution
    return (
        int(math.floor(xmin / r)),
        int(math.floor(xmax / r)),
        int(math.floor(ymin / r)),
        int(math.floor(ymax / r)),
    )


def occupied_cells_in_box(m: GridMap, xmin, xmax, ymin, ymax) -> list[tuple[int, int]]:
    """Occupied cells (closed) touching the box; out-of-map cells count as occupied."""
    c0, c1, r0, r1 = _cell_range(m, xmin, xmax, ymin, ymax)
    # a box edge exactly on a grid line also touches the neighbouring cell
    r = m.resolution
    if xmin == c0 * r:
        c0 -= 1
    if ymin == r0 * r:
        r0 -= 1
    W, H = m.width, m.height
    if c0 >= 0 and r0 >= 0 and c1 < W and r1 < H:
        sub = m.occupancy[r0:r1 + 1, c0:c1 + 1]
        if not sub.any():
            return []
        rows, cols = np.nonzero(sub)
        return list(zip((cols + c0).tolist(), (rows + r0).tolist()))
    out = []
    for row in range(r0, r1 + 1):
        for col in range(c0, c1 + 1):
            if m.occupied(col, row):
                out.append((col, row))
    return out


def _poly_rect_intersect(poly: Sequence[Point], x0, y0, x1, y1) -> bool:
    """Closed polygon vs closed axis-aligned rectangle."""
    for x, y in poly:
        if x0 <= x <= x1 and y0 <= y <= y1:
            return True
    rect = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        if max(p[0], q[0]) < x0 or min(p[0], q[0]) > x1 or max(p[1], q[1]) < y0 or min(p[1], q[1]) > y1:
            continue
        for j in range(4):
            if segments_intersect(p, q, rect[j], rect[(j + 1) % 4], 0.0):
                return True
    # rectangle fully inside the polygon
    return point_in_polygon(((x0 + x1) * 0.5, (y0 + y1) * 0.5), poly)


def is_footprint_free(m: GridMap, fp: Sequence[Point], margin: float = 0.0) -> bool:
    """True iff no occupied cell, grown by ``margin``, touches the closed polygon."""
    xs = [p[0] for p in fp]
    ys = [p[1] for p in fp]
    xmin, xmax, ymin, ymax = min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin
    cells = occupied_cells_in_box(m, xmin, xmax, ymin, ymax)
    if not cells:
        return True
    r = m.resolution
    for col, row in cells:
        x0, y0 = col * r - margin, row * r - margin
        if _poly_rect_intersect(fp, x0, y0, x0 + r + 2 * margin, y0 + r + 2 * margin):
            return False
    return True


_NEIGHBOURS = [
    (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
    (1, 1, math.sqrt(2)), (1, -1, math.sqrt(2)), (-1, 1, math.sqrt(2)), (-1, -1, math.sqrt(2)),
]


def grid_neighbours(m: GridMap, col: int, row: int):
    """8-connected free neighbours; diagonals may not cut an occupied corner."""
    for dc, dr, w in _NEIGHBOURS:
        c, rr = col + dc, row + dr
        if m.occupied(c, rr):
            continue
        if dc and dr and (m.occupied(col + dc, row) or m.occupied(col, row + dr)):
            continue
        yield c, rr, w


def shortest_grid_path(m: GridMap, start: Sequence[float], goal: Sequence[float]) -> list[Point]:
    """8-connected Dijkstra over cell centres, returned start-first."""
    s = m.cell_of(start)
    g = m.cell_of(goal)
    if m.occupied(*s) or m.occupied(*g):
        raise NoPath("endpoint lies in an occupied cell")
    dist = {s: 0.0}
    prev: dict = {}
    pq = [(0.0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if u == g:
            break
        if d > dist[u]:
            continue
        for c, rr, w in grid_neighbours(m, *u):
            nd = d + w
            v = (c, rr)
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(pq, (nd, v))
    if g not in dist:
        raise NoPath(f"no grid path from {start} to {goal}")
    cells = [g]
    while cells[-1] != s:
        cells.append(prev[cells[-1]])
    cells.reverse()
    return [m.cell_center(*c) for c in cells]


def clearance_map(m: GridMap) -> np.ndarray:
    """Distance from each cell centre to the nearest occupied cell centre.

    The map border counts as occupied. A point inside cell (col, row) is at
    least ``clearance[row, col] - sqrt(2) * resolution`` away from every
    occupied cell.
    """
    P = np.ones((m.height + 2, m.width + 2), dtype=bool)
    P[1:-1, 1:-1] = m.occupancy
    d = ndimage.distance_transform_edt(~P)
    return d[1:-1, 1:-1] * m.resolution
