import math
import random

import numpy as np
import pytest
from scipy.special import comb

from corridor_planner.errors import DegenerateTangent, InvalidInput
from corridor_planner.geometry import (
    BezierCurve,
    Direction,
    Polygon,
    Pose,
    VehicleParams,
    bezier_curvature,
    bezier_point,
    footprint_corners,
    normalize_angle,
    point_in_polygon_even_odd,
    sample_bezier,
)

CUBIC = BezierCurve(((0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)))


# ---------------------------------------------------------------- oracles


def bernstein_eval(cps, t):
    """Polynomial evaluation valid for any t, independent of de Casteljau."""
    n = len(cps) - 1
    x = sum(comb(n, i) * t**i * (1 - t) ** (n - i) * cps[i][0] for i in range(n + 1))
    y = sum(comb(n, i) * t**i * (1 - t) ** (n - i) * cps[i][1] for i in range(n + 1))
    return x, y


def fd_curvature(cps, t, h=1e-5):
    """Central finite-difference curvature; may sample outside [0, 1]."""
    xm, ym = bernstein_eval(cps, t - h)
    x0, y0 = bernstein_eval(cps, t)
    xp, yp = bernstein_eval(cps, t + h)
    dx, dy = (xp - xm) / (2 * h), (yp - ym) / (2 * h)
    ddx, ddy = (xp - 2 * x0 + xm) / h**2, (yp - 2 * y0 + ym) / h**2
    return (dx * ddy - dy * ddx) / (dx * dx + dy * dy) ** 1.5


def winding_inside(p, vertices):
    """Winding-number oracle (nonzero rule == even-odd for simple polygons)."""
    x, y = p
    winding = 0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if y1 <= y < y2 and (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) > 0:
            winding += 1
        elif y2 <= y < y1 and (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) < 0:
            winding -= 1
    return winding != 0


# ---------------------------------------------------------------- angles


def test_normalize_angle_identity():
    assert normalize_angle(0.0) == 0.0


def test_normalize_angle_modular_reduction():
    assert normalize_angle(3 * math.pi) == pytest.approx(math.pi, abs=1e-12)


def test_normalize_angle_boundary_maps_to_pi():
    assert normalize_angle(-math.pi) == pytest.approx(math.pi, abs=1e-12)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
def test_normalize_angle_rejects_nonfinite(bad):
    with pytest.raises(InvalidInput):
        normalize_angle(bad)


def test_normalize_angle_congruence_property():
    rng = random.Random(1)
    for _ in range(500):
        a = rng.uniform(-50.0, 50.0)
        r = normalize_angle(a)
        assert -math.pi < r <= math.pi
        assert math.isclose(math.sin(r), math.sin(a), abs_tol=1e-9)
        assert math.isclose(math.cos(r), math.cos(a), abs_tol=1e-9)


# ---------------------------------------------------------------- types


def test_pose_normalizes_theta():
    assert Pose(0, 0, 3 * math.pi).theta == pytest.approx(math.pi)


def test_bezier_needs_two_points():
    with pytest.raises(InvalidInput):
        BezierCurve(((0.0, 0.0),))


def test_bezier_rejects_all_coincident():
    with pytest.raises(InvalidInput):
        BezierCurve(((1.0, 1.0), (1.0, 1.0), (1.0, 1.0)))


def test_polygon_needs_three_vertices():
    with pytest.raises(InvalidInput):
        Polygon(((0, 0), (1, 0)))


def test_polygon_rejects_duplicate_consecutive():
    with pytest.raises(InvalidInput):
        Polygon(((0, 0), (1, 0), (1, 0), (0, 1)))


def test_vehicle_params_validation():
    with pytest.raises(InvalidInput):
        VehicleParams(length=0.0, width=1.0)
    with pytest.raises(InvalidInput):
        VehicleParams(length=1.0, width=1.0, min_turn_radius=-1.0)


# ---------------------------------------------------------------- bezier_point


def test_bezier_point_endpoints_exact():
    assert bezier_point(CUBIC, 0.0) == (0.0, 0.0)
    assert bezier_point(CUBIC, 1.0) == (1.0, 0.0)


def test_bezier_point_midpoint_hand_value():
    # de Casteljau by hand: (P0 + 3 P1 + 3 P2 + P3) / 8
    x, y = bezier_point(CUBIC, 0.5)
    assert x == pytest.approx(0.5, abs=1e-12)
    assert y == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("t", [-0.1, 1.1, 2.0])
def test_bezier_point_rejects_out_of_range(t):
    with pytest.raises(InvalidInput):
        bezier_point(CUBIC, t)


def test_bezier_point_matches_bernstein_oracle():
    rng = random.Random(7)
    for _ in range(20):
        cps = tuple((rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(rng.randint(2, 6)))
        try:
            curve = BezierCurve(cps)
        except InvalidInput:
            continue
        for t in (0.0, 0.13, 0.5, 0.77, 1.0):
            x, y = bezier_point(curve, t)
            ox, oy = bernstein_eval(cps, t)
            assert math.isclose(x, ox, abs_tol=1e-9)
            assert math.isclose(y, oy, abs_tol=1e-9)


# ---------------------------------------------------------------- curvature


def test_curvature_straight_line_is_zero():
    line = BezierCurve(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)))
    for t in np.linspace(0, 1, 11):
        assert bezier_curvature(line, float(t)) == pytest.approx(0.0, abs=1e-12)


def test_curvature_quadratic_matches_fd_oracle():
    quad = BezierCurve(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)))
    got = bezier_curvature(quad, 0.5)
    want = fd_curvature(quad.control_points, 0.5)
    assert got == pytest.approx(want, rel=1e-6)


def test_curvature_cubic_start_sign_and_magnitude():
    # altitude law at t=0: |kappa| = (2/3) * h / |P1-P0|^2, turning right => negative
    got = bezier_curvature(CUBIC, 0.0)
    assert got == pytest.approx(-2.0 / 3.0, rel=1e-9)
    assert got == pytest.approx(fd_curvature(CUBIC.control_points, 0.0), rel=1e-4)


def test_curvature_grid_property_against_fd_oracle():
    rng = random.Random(13)
    curves = [CUBIC]
    while len(curves) < 20:
        cps = tuple((rng.uniform(-4, 4), rng.uniform(-4, 4)) for _ in range(rng.randint(3, 5)))
        try:
            curves.append(BezierCurve(cps))
        except InvalidInput:
            continue
    for curve in curves:
        for t in np.linspace(0, 1, 101):
            try:
                got = bezier_curvature(curve, float(t))
            except DegenerateTangent:
                continue
            want = fd_curvature(curve.control_points, float(t))
            assert abs(got - want) <= 1e-4 * max(1.0, abs(want))


def test_curvature_degenerate_tangent_raises():
    pinched = BezierCurve(((0.0, 0.0), (0.0, 0.0), (1.0, 0.0)))
    with pytest.raises(DegenerateTangent):
        bezier_curvature(pinched, 0.0)


# ---------------------------------------------------------------- sampling


def test_sample_line_forward():
    line = BezierCurve(((0.0, 0.0), (1.0, 0.0)))
    samples = sample_bezier(line, 0.5, Direction.FORWARD)
    assert [p.x for p, _ in samples] == pytest.approx([0.0, 0.5, 1.0], abs=1e-9)
    assert all(p.theta == pytest.approx(0.0, abs=1e-12) for p, _ in samples)
    assert all(d is Direction.FORWARD for _, d in samples)


def test_sample_line_reverse_flips_heading():
    line = BezierCurve(((0.0, 0.0), (1.0, 0.0)))
    samples = sample_bezier(line, 0.5, Direction.REVERSE)
    assert [p.x for p, _ in samples] == pytest.approx([0.0, 0.5, 1.0], abs=1e-9)
    assert all(p.theta == pytest.approx(math.pi, abs=1e-12) for p, _ in samples)


def test_sample_rejects_nonpositive_spacing():
    with pytest.raises(InvalidInput):
        sample_bezier(CUBIC, 0.0)


def test_sample_cubic_length_against_dense_oracle():
    samples = sample_bezier(CUBIC, 0.05)
    poly_len = sum(
        math.hypot(b.x - a.x, b.y - a.y)
        for (a, _), (b, _) in zip(samples, samples[1:])
    )
    ts = np.linspace(0.0, 1.0, 100_001)
    pts = np.array([bernstein_eval(CUBIC.control_points, t) for t in ts])
    oracle_len = float(np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1])).sum())
    assert abs(poly_len - oracle_len) <= 1e-3 * oracle_len


def test_sample_endpoints_exact_and_spacing_bounded():
    samples = sample_bezier(CUBIC, 0.1)
    assert samples[0][0].position == (0.0, 0.0)
    assert samples[-1][0].position == (1.0, 0.0)
    for (a, _), (b, _) in zip(samples, samples[1:]):
        assert a.distance_to(b) <= 0.1 + 1e-6


def test_sample_heading_continuity():
    from corridor_planner.geometry import bezier_max_abs_curvature

    ds = 0.05
    kappa_max = bezier_max_abs_curvature(CUBIC, 501)
    bound = 2.0 * math.asin(min(1.0, ds * kappa_max / 2.0)) + 1e-6
    samples = sample_bezier(CUBIC, ds)
    for (a, _), (b, _) in zip(samples, samples[1:]):
        assert abs(a.heading_error(b)) <= bound


# ---------------------------------------------------------------- even-odd


UNIT_SQUARE = Polygon(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
L_SHAPE = Polygon(((0, 0), (3, 0), (3, 1), (2, 1), (2, 2), (0, 2)))


def test_even_odd_interior():
    assert point_in_polygon_even_odd((0.5, 0.5), UNIT_SQUARE)


def test_even_odd_exterior():
    assert not point_in_polygon_even_odd((2.0, 0.5), UNIT_SQUARE)


def test_even_odd_l_shape_against_winding_oracle():
    p = (1.5, 0.5)
    assert winding_inside(p, L_SHAPE.vertices)
    assert point_in_polygon_even_odd(p, L_SHAPE)
    notch = (2.5, 1.5)  # inside the bounding box but outside the L
    assert not winding_inside(notch, L_SHAPE.vertices)
    assert not point_in_polygon_even_odd(notch, L_SHAPE)


def test_even_odd_boundary_counts_inside():
    assert point_in_polygon_even_odd((0.0, 0.5), UNIT_SQUARE)
    assert point_in_polygon_even_odd((1.0, 1.0), UNIT_SQUARE)
    assert point_in_polygon_even_odd((0.5, 0.0), UNIT_SQUARE)


def test_even_odd_matches_half_plane_test_on_convex_polygons():
    rng = np.random.RandomState(23)
    for _ in range(20):
        n = rng.randint(3, 9)
        angles = np.sort(rng.uniform(0, 2 * math.pi, n))
        if np.min(np.diff(angles)) < 1e-3:
            continue
        radius = rng.uniform(0.5, 3.0)
        cx, cy = rng.uniform(-2, 2, 2)
        verts = [(cx + radius * math.cos(a), cy + radius * math.sin(a)) for a in angles]
        poly = Polygon(tuple(verts))

        for _ in range(50):
            p = (float(rng.uniform(-6, 6)), float(rng.uniform(-6, 6)))
            # convex half-plane oracle (counter-clockwise vertices)
            inside = True
            for i in range(n):
                x1, y1 = verts[i]
                x2, y2 = verts[(i + 1) % n]
                if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) < -1e-9:
                    inside = False
                    break
            assert point_in_polygon_even_odd(p, poly) == inside


# ---------------------------------------------------------------- footprint


VEH = VehicleParams(length=2.0, width=1.0, ref_offset=0.0, min_turn_radius=1.0)


def test_footprint_axis_aligned():
    corners = footprint_corners(Pose(0, 0, 0), VEH)
    assert sorted(corners) == sorted([(1, 0.5), (1, -0.5), (-1, -0.5), (-1, 0.5)])


def test_footprint_rotated_quarter_turn():
    corners = footprint_corners(Pose(0, 0, math.pi / 2), VEH)
    expected = [(-0.5, 1), (0.5, 1), (0.5, -1), (-0.5, -1)]
    for c, e in zip(sorted(corners), sorted(expected)):
        assert c == pytest.approx(e, abs=1e-12)


def test_footprint_rotation_matrix_oracle():
    pose = Pose(1.0, 1.0, math.pi / 4)
    corners = footprint_corners(pose, VEH)
    cos_t, sin_t = math.cos(pose.theta), math.sin(pose.theta)
    local = [(1.0, 0.5), (1.0, -0.5), (-1.0, -0.5), (-1.0, 0.5)]
    expected = [
        (pose.x + lx * cos_t - ly * sin_t, pose.y + lx * sin_t + ly * cos_t)
        for lx, ly in local
    ]
    for c, e in zip(sorted(corners), sorted(expected)):
        assert c[0] == pytest.approx(e[0], abs=1e-9)
        assert c[1] == pytest.approx(e[1], abs=1e-9)


def test_footprint_respects_ref_offset():
    veh = VehicleParams(length=2.0, width=1.0, ref_offset=0.5)
    corners = footprint_corners(Pose(0, 0, 0), veh)
    xs = sorted(c[0] for c in corners)
    assert xs == pytest.approx([-0.5, -0.5, 1.5, 1.5])


def test_footprint_edge_lengths_preserved():
    rng = random.Random(3)
    for _ in range(50):
        pose = Pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-4, 4))
        fl, fr, rr, rl = footprint_corners(pose, VEH)
        assert math.dist(fl, fr) == pytest.approx(VEH.width, abs=1e-9)
        assert math.dist(rr, rl) == pytest.approx(VEH.width, abs=1e-9)
        assert math.dist(fr, rr) == pytest.approx(VEH.length, abs=1e-9)
        assert math.dist(rl, fl) == pytest.approx(VEH.length, abs=1e-9)
