import math

import numpy as np
import pytest

from seftpp.geometry import Pose2, footprint_at, point_in_polygon
from seftpp.scenario import DEFAULT_FOOTPRINT, bundled
from seftpp.worldmodel import (
    GridMap,
    MapParseError,
    NoPath,
    clearance_map,
    dump_ascii,
    extract_obstacles,
    is_footprint_free,
    load_grid,
    shortest_grid_path,
)

from scenes import random_rects, rect_map


def test_ascii_center_cell():
    m = load_grid("3 3\n...\n.#.\n...\n")
    assert m.occupancy.sum() == 1 and m.occupied(1, 1)
    # outside the map counts as occupied
    assert m.occupied(-1, 0) and m.occupied(3, 1)


def test_ascii_rows_are_top_down():
    m = load_grid("2 2\n#.\n..\n")
    assert m.occupied(0, 1) and not m.occupied(0, 0)
    assert load_grid(dump_ascii(m)) == m


@pytest.mark.parametrize(
    "text,line",
    [("", 1), ("3 x\n", 1), ("2 2\n..\n", 2), ("2 2\n..\n...\n", 3), ("2 2\n..\n.?\n", 3)],
)
def test_ascii_parse_errors(text, line):
    with pytest.raises(MapParseError) as e:
        load_grid(text)
    assert e.value.line == line


def test_pgm_plain_and_binary():
    plain = b"P2\n# comment\n3 2\n255\n255 0 255\n255 255 255\n"
    m = load_grid(plain, "pgm")
    # first image row is the top of the map
    assert m.occupied(1, 1) and m.occupancy.sum() == 1
    binary = b"P5\n3 2\n255\n" + bytes([255, 0, 255, 255, 255, 255])
    assert load_grid(binary, "pgm") == m
    with pytest.raises(MapParseError):
        load_grid(b"P2\n3 2\n255\n1 2\n", "pgm")
    with pytest.raises(MapParseError):
        load_grid(b"", "pgm")


def test_bundled_map_has_eight_obstacles():
    text = (bundled("case1").parent / "case_map.txt").read_text()
    m = load_grid(text)
    assert (m.width, m.height) == (100, 100)
    assert len(extract_obstacles(m)) == 8


def test_single_cell_obstacle():
    occ = np.zeros((10, 10), bool)
    occ[5, 5] = True
    (ob,) = extract_obstacles(GridMap(occ))
    assert set(ob.boundary.vertices) == {(5.0, 5.0), (6.0, 5.0), (6.0, 6.0), (5.0, 6.0)}
    assert point_in_polygon(ob.representative, ob.boundary.vertices)


def test_corner_touching_cells_are_separate():
    occ = np.zeros((10, 10), bool)
    occ[3, 3] = occ[4, 4] = True
    assert len(extract_obstacles(GridMap(occ))) == 2
    assert extract_obstacles(GridMap(np.zeros((4, 4), bool))) == []


def test_ray_x_deduplicated():
    # two columns of blobs with the same leftmost x
    occ = np.zeros((12, 6), bool)
    occ[1:3, 2] = True
    occ[5:7, 2] = True
    occ[9:11, 2] = True
    obs = extract_obstacles(GridMap(occ))
    xs = [o.ray_x for o in obs]
    assert len(set(xs)) == 3
    for o in obs:
        assert point_in_polygon(o.representative, o.boundary.vertices)


def _corner_is_boundary(occ, i, j):
    """Corner (i, j) touches both occupied and free cells (outside counts as free)."""
    h, w = occ.shape
    vals = []
    for c in (i - 1, i):
        for r in (j - 1, j):
            vals.append(bool(occ[r, c]) if 0 <= c < w and 0 <= r < h else False)
    return any(vals) and not all(vals)


def test_random_maps_vertices_on_boundary():
    rng = np.random.default_rng(7)
    for _ in range(30):
        occ = rng.random((20, 20)) < 0.3
        m = GridMap(occ)
        obs = extract_obstacles(m)
        n_cells = 0
        for ob in obs:
            n_cells += len(ob.cells)
            for x, y in ob.boundary.vertices:
                assert x == int(x) and y == int(y)
                assert _corner_is_boundary(occ, int(x), int(y))
            assert point_in_polygon(ob.representative, ob.boundary.vertices)
        assert n_cells == occ.sum()
        assert len({ob.ray_x for ob in obs}) == len(obs)


def test_footprint_free_examples():
    m = rect_map(20, [(10, 12, 10, 12)])
    assert is_footprint_free(m, footprint_at(DEFAULT_FOOTPRINT, Pose2(4.0, 4.0, 0.3)))
    assert not is_footprint_free(m, footprint_at(DEFAULT_FOOTPRINT, Pose2(10.5, 10.5, 0.0)))
    # beyond the border is occupied
    assert not is_footprint_free(m, footprint_at(DEFAULT_FOOTPRINT, Pose2(0.5, 5.0, 0.0)))


def test_footprint_free_never_misses_sampled_contact():
    rng = np.random.default_rng(3)
    m = rect_map(30, random_rects(rng, 30, 8))
    occ = m.occupancy
    g = np.arange(-1.0, 1.0 + 1e-9, 0.05)
    gx, gy = np.meshgrid(g, g * 0.7)
    body = np.stack([gx.ravel(), gy.ravel()], axis=1)
    for _ in range(1000):
        pose = Pose2(rng.uniform(1, 29), rng.uniform(1, 29), rng.uniform(-math.pi, math.pi))
        c, s = math.cos(pose.theta), math.sin(pose.theta)
        wx = pose.x + c * body[:, 0] - s * body[:, 1]
        wy = pose.y + s * body[:, 0] + c * body[:, 1]
        cols, rows = np.floor(wx).astype(int), np.floor(wy).astype(int)
        inside = (cols >= 0) & (cols < 30) & (rows >= 0) & (rows < 30)
        hit = (~inside).any() or occ[rows[inside], cols[inside]].any()
        if hit:
            assert not is_footprint_free(m, footprint_at(DEFAULT_FOOTPRINT, pose))


def _value_iteration(m, start):
    """Grid distances by repeated relaxation until nothing changes."""
    INF = math.inf
    h, w = m.height, m.width
    d = np.full((h, w), INF)
    d[start[1], start[0]] = 0.0
    moves = [(dc, dr) for dc in (-1, 0, 1) for dr in (-1, 0, 1) if dc or dr]
    changed = True
    while changed:
        changed = False
        for r in range(h):
            for c in range(w):
                if m.occupied(c, r):
                    continue
                for dc, dr in moves:
                    pc, pr = c - dc, r - dr
                    if m.occupied(pc, pr):
                        continue
                    if dc and dr and (m.occupied(pc + dc, pr) or m.occupied(pc, pr + dr)):
                        continue
                    nd = d[pr, pc] + math.hypot(dc, dr)
                    if nd < d[r, c] - 1e-12:
                        d[r, c] = nd
                        changed = True
    return d


def test_shortest_path_examples():
    m = rect_map(10, [])
    path = shortest_grid_path(m, (0.5, 4.5), (7.5, 4.5))
    assert path == [(x + 0.5, 4.5) for x in range(8)]
    assert shortest_grid_path(m, (2.2, 2.7), (2.9, 2.1)) == [(2.5, 2.5)]
    with pytest.raises(NoPath):
        shortest_grid_path(rect_map(10, [(5, 6, 0, 10)]), (1.5, 1.5), (8.5, 1.5))


def test_shortest_path_matches_relaxation_oracle():
    m = rect_map(12, [(4, 8, 3, 9)])
    start, goal = (1, 6), (10, 6)
    path = shortest_grid_path(m, (1.5, 6.5), (10.5, 6.5))
    length = sum(math.dist(a, b) for a, b in zip(path, path[1:]))
    assert length == pytest.approx(_value_iteration(m, start)[goal[1], goal[0]])
    for a, b in zip(path, path[1:]):
        assert max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1.0


def test_clearance_map():
    m = rect_map(9, [(4, 5, 4, 5)])
    clr = clearance_map(m)
    assert clr[4, 4] == 0.0
    assert clr[4, 6] == pytest.approx(2.0)
    assert clr[0, 0] == pytest.approx(1.0)  # next to the border
