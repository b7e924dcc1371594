import heapq
import math

import numpy as np
import pytest

from corridor_planner.errors import GoalBlocked, InvalidInput, ParseError
from corridor_planner.geometry import Direction, Pose, VehicleParams
from corridor_planner.grid_map import (
    GridMap,
    default_margin,
    distance_field,
    emit_pgm,
    footprint_collides,
    holonomic_cost_field,
    load_grid,
    path_collides,
)
from corridor_planner.paths import Path, PathPoint, Provenance

VEH = VehicleParams(length=1.2, width=0.8, ref_offset=0.0, min_turn_radius=1.0)


def make_grid(occ: np.ndarray, resolution=0.5, origin=(0.0, 0.0)) -> GridMap:
    h, w = occ.shape
    return GridMap(w, h, resolution, origin, occ)


# ---------------------------------------------------------------- PGM I/O


def test_load_p2_thresholding():
    pgm = b"P2\n2 2\n255\n255 0\n255 255\n"
    g = load_grid(pgm, 1.0, (0.0, 0.0), 128)
    # image row 0 is the TOP of the map -> world row iy=1
    assert g.occupancy[1, 1] and not g.occupancy[1, 0]
    assert not g.occupancy[0, 0] and not g.occupancy[0, 1]


def test_load_all_free():
    pgm = b"P2\n3 2\n255\n" + b" ".join(b"255" for _ in range(6))
    g = load_grid(pgm, 0.1, (0.0, 0.0), 128)
    assert not g.occupancy.any()


def test_p2_and_p5_agree():
    rng = np.random.RandomState(5)
    raster = rng.randint(0, 256, size=(7, 9), dtype=np.uint8)
    p2 = ("P2\n9 7\n255\n" + "\n".join(" ".join(str(v) for v in row) for row in raster)).encode()
    p5 = b"P5\n9 7\n255\n" + raster.tobytes()
    g2 = load_grid(p2, 0.3, (1.0, -2.0), 100)
    g5 = load_grid(p5, 0.3, (1.0, -2.0), 100)
    assert np.array_equal(g2.occupancy, g5.occupancy)


def test_pgm_comments_are_skipped():
    pgm = b"P2\n# a comment\n2 1\n# another\n255\n0 255\n"
    g = load_grid(pgm, 1.0, (0.0, 0.0), 128)
    assert g.occupancy[0, 0] and not g.occupancy[0, 1]


def test_emit_then_load_is_idempotent():
    rng = np.random.RandomState(11)
    occ = rng.rand(12, 8) < 0.3
    g = make_grid(occ, 0.25, (3.0, 4.0))
    g2 = load_grid(emit_pgm(g), 0.25, (3.0, 4.0), 128)
    assert np.array_equal(g.occupancy, g2.occupancy)
    assert emit_pgm(g) == emit_pgm(g2)


@pytest.mark.parametrize(
    "data",
    [
        b"",
        b"P7\n2 2\n255\n0 0 0 0",
        b"P2\n2 2\n255\n0 0 0",  # short raster
        b"P2\n2 2\n70000\n0 0 0 0",  # maxval too big
        b"P5\n4 4\n255\nshort",
        b"P2\n2 2\n255\n0 0 0 abc",
    ],
)
def test_malformed_pgm_raises_parse_error(data):
    with pytest.raises(ParseError):
        load_grid(data, 1.0, (0.0, 0.0), 128)


def test_zero_dimensions_raise_invalid_input():
    with pytest.raises(InvalidInput):
        load_grid(b"P2\n0 2\n255\n", 1.0, (0.0, 0.0), 128)


# ---------------------------------------------------------------- collision


def half_plane_oracle(pose: Pose, veh: VehicleParams, grid: GridMap, margin: float) -> bool:
    """Test every occupied cell center against the four half-plane inequalities."""
    hl, hw = veh.length / 2 + margin, veh.width / 2 + margin
    cos_t, sin_t = math.cos(pose.theta), math.sin(pose.theta)
    cx = pose.x + veh.ref_offset * cos_t
    cy = pose.y + veh.ref_offset * sin_t
    x0, y0, x1, y1 = grid.world_bounds
    corners = [
        (cx + sx * hl * cos_t - sy * hw * sin_t, cy + sx * hl * sin_t + sy * hw * cos_t)
        for sx, sy in ((1, 1), (1, -1), (-1, -1), (-1, 1))
    ]
    if any(not (x0 <= qx <= x1 and y0 <= qy <= y1) for qx, qy in corners):
        return True
    iys, ixs = np.nonzero(grid.occupancy)
    if len(ixs) == 0:
        return False
    px = grid.origin[0] + (ixs + 0.5) * grid.resolution - cx
    py = grid.origin[1] + (iys + 0.5) * grid.resolution - cy
    u = px * cos_t + py * sin_t
    w = -px * sin_t + py * cos_t
    return bool(np.any((np.abs(u) <= hl) & (np.abs(w) <= hw)))


def test_footprint_free_on_empty_map():
    g = make_grid(np.zeros((20, 20), bool))
    assert not footprint_collides(Pose(5, 5, 0.7), VEH, g, 0.1)


def test_footprint_hits_covered_cell_center():
    occ = np.zeros((20, 20), bool)
    occ[10, 10] = True  # center (5.25, 5.25)
    g = make_grid(occ)
    assert footprint_collides(Pose(5.25, 5.25, 0.0), VEH, g, 0.0)


def test_footprint_out_of_bounds_is_collision():
    g = make_grid(np.zeros((20, 20), bool))
    assert footprint_collides(Pose(0.1, 5.0, 0.0), VEH, g, 0.0)
    assert footprint_collides(Pose(5.0, 9.9, math.pi / 2), VEH, g, 0.0)


def test_footprint_oracle_equivalence_random_maps():
    rng = np.random.RandomState(42)
    disagreements = 0
    for _map in range(10):
        occ = rng.rand(64, 64) < 0.08
        g = GridMap(64, 64, 0.25, (0.0, 0.0), occ)
        df = distance_field(g)
        for _trial in range(50):
            pose = Pose(
                float(rng.uniform(0, 16)),
                float(rng.uniform(0, 16)),
                float(rng.uniform(-math.pi, math.pi)),
            )
            margin = float(rng.uniform(0.0, 0.3))
            want = half_plane_oracle(pose, VEH, g, margin)
            if footprint_collides(pose, VEH, g, margin) != want:
                disagreements += 1
            if footprint_collides(pose, VEH, g, margin, df) != want:
                disagreements += 1
    assert disagreements == 0


def test_footprint_monotone_in_margin():
    rng = np.random.RandomState(9)
    occ = rng.rand(40, 40) < 0.1
    g = make_grid(occ, 0.3)
    for _ in range(200):
        pose = Pose(
            float(rng.uniform(0, 12)),
            float(rng.uniform(0, 12)),
            float(rng.uniform(-math.pi, math.pi)),
        )
        m1 = float(rng.uniform(0, 0.2))
        m2 = m1 + float(rng.uniform(0, 0.3))
        if footprint_collides(pose, VEH, g, m1):
            assert footprint_collides(pose, VEH, g, m2)


def _path_of(poses):
    return Path(tuple(PathPoint(p, Direction.FORWARD, Provenance.HYBRID_ASTAR) for p in poses))


def test_path_collides_none_when_free():
    g = make_grid(np.zeros((20, 20), bool))
    path = _path_of([Pose(3, 3, 0), Pose(4, 3, 0), Pose(5, 3, 0)])
    assert path_collides(path, VEH, g, 0.1) is None


def test_path_collides_reports_first_index():
    occ = np.zeros((20, 20), bool)
    occ[6, 10] = True  # center (5.25, 3.25)
    g = make_grid(occ)
    path = _path_of([Pose(2, 3.25, 0), Pose(3.0, 3.25, 0), Pose(5.25, 3.25, 0)])
    assert path_collides(path, VEH, g, 0.0) == 2


# ---------------------------------------------------------------- fields


def test_distance_field_all_free_is_infinite():
    g = make_grid(np.zeros((8, 8), bool))
    df = distance_field(g)
    assert np.all(np.isinf(df.values))


def test_distance_field_zero_at_occupied():
    occ = np.zeros((8, 8), bool)
    occ[3, 4] = True
    df = distance_field(make_grid(occ))
    assert df.values[3, 4] == 0.0


def test_distance_field_matches_euclidean_brute_force():
    rng = np.random.RandomState(17)
    occ = rng.rand(16, 16) < 0.15
    occ[0, 0] = True  # guarantee at least one obstacle
    res = 0.5
    df = distance_field(make_grid(occ, res))
    oys, oxs = np.nonzero(occ)
    for iy in range(16):
        for ix in range(16):
            exact = res * math.sqrt(((oxs - ix) ** 2 + (oys - iy) ** 2).min())
            assert abs(df.values[iy, ix] - exact) <= res * 0.42 + 1e-9
            assert df.values[iy, ix] == pytest.approx(exact, abs=1e-9)


def octile_cells(ax, ay, bx, by):
    dx, dy = abs(ax - bx), abs(ay - by)
    return max(dx, dy) + (math.sqrt(2.0) - 1.0) * min(dx, dy)


def test_cost_field_free_map_is_octile():
    g = make_grid(np.zeros((12, 12), bool), 0.5)
    goal = Pose(2.25, 2.75, 0.0)  # cell (4, 5)
    cf = holonomic_cost_field(g, goal, VEH)
    assert cf.at_cell(4, 5) == 0.0
    for iy in range(12):
        for ix in range(12):
            want = octile_cells(ix, iy, 4, 5) * 0.5
            assert cf.at_cell(ix, iy) == pytest.approx(want, abs=1e-9)


def test_cost_field_walled_region_unreachable():
    occ = np.zeros((12, 12), bool)
    occ[:, 6] = True
    g = make_grid(occ, 0.5)
    cf = holonomic_cost_field(g, Pose(1.0, 1.0, 0.0), VEH)
    assert math.isinf(cf.at_cell(10, 5))


def test_cost_field_goal_blocked():
    occ = np.zeros((12, 12), bool)
    occ[4, 4] = True
    g = make_grid(occ, 0.5)
    with pytest.raises(GoalBlocked):
        holonomic_cost_field(g, Pose(2.25, 2.25, 0.0), VEH)
    with pytest.raises(GoalBlocked):
        holonomic_cost_field(g, Pose(100.0, 100.0, 0.0), VEH)


def dijkstra_oracle(g: GridMap, goal_cell, veh: VehicleParams) -> np.ndarray:
    """Independent 8-connected Dijkstra over disc-admissible cells."""
    df = distance_field(g)
    blocked = g.occupancy | (df.values < veh.width / 2.0)
    gx, gy = goal_cell
    blocked[gy, gx] = False
    dist = np.full((g.height, g.width), np.inf)
    dist[gy, gx] = 0.0
    heap = [(0.0, gx, gy)]
    moves = [
        (dx, dy, g.resolution * math.hypot(dx, dy))
        for dx in (-1, 0, 1)
        for dy in (-1, 0, 1)
        if dx or dy
    ]
    while heap:
        d, x, y = heapq.heappop(heap)
        if d > dist[y, x]:
            continue
        for dx, dy, w in moves:
            nx, ny = x + dx, y + dy
            if 0 <= nx < g.width and 0 <= ny < g.height and not blocked[ny, nx]:
                nd = d + w
                if nd < dist[ny, nx] - 1e-12:
                    dist[ny, nx] = nd
                    heapq.heappush(heap, (nd, nx, ny))
    return dist


def test_cost_field_matches_dijkstra_oracle_and_never_overestimates():
    rng = np.random.RandomState(31)
    for _case in range(5):
        occ = rng.rand(24, 24) < 0.12
        g = make_grid(occ, 0.4)
        gx, gy = 12, 12
        if occ[gy, gx]:
            continue
        goal = Pose(*g.cell_center(gx, gy), 0.0)
        cf = holonomic_cost_field(g, goal, VEH)
        oracle = dijkstra_oracle(g, (gx, gy), VEH)
        both_finite = np.isfinite(cf.values) & np.isfinite(oracle)
        assert np.array_equal(np.isfinite(cf.values), np.isfinite(oracle))
        assert np.allclose(cf.values[both_finite], oracle[both_finite], atol=1e-6)
        assert np.all(cf.values[both_finite] <= oracle[both_finite] + 1e-6)


def test_default_margin_value():
    assert default_margin(0.2) == pytest.approx(0.2 / math.sqrt(2.0))
