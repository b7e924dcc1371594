"""Planar primitives: angles, Bezier curves, polygon containment, vehicle footprints.

Everything here is immutable and pure; coordinates are meters, angles radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import DegenerateTangent, InvalidInput

Point = tuple[float, float]

TWO_PI = 2.0 * math.pi

# below this squared speed the curve tangent is considered vanishing
_TANGENT_EPS2 = 1e-24
# absolute slack (meters) for the on-boundary polygon test
_BOUNDARY_EPS = 1e-9


class Direction(Enum):
    """Travel direction of the vehicle along a path piece."""

    FORWARD = "F"
    REVERSE = "R"

    def flipped(self) -> "Direction":
        return Direction.REVERSE if self is Direction.FORWARD else Direction.FORWARD


def normalize_angle(a: float) -> float:
    """Reduce an angle to its (-pi, pi] representative."""
    if not math.isfinite(a):
        raise InvalidInput(f"angle must be finite, got {a!r}")
    r = a % TWO_PI  # [0, 2*pi)
    if r > math.pi:
        r -= TWO_PI
    return r


def angle_difference(a: float, b: float) -> float:
    """Smallest signed angle taking b onto a, in (-pi, pi]."""
    return normalize_angle(a - b)


@dataclass(frozen=True)
class Pose:
    """Planar configuration (x, y, heading) of the vehicle reference point."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def position(self) -> Point:
        return (self.x, self.y)

    def distance_to(self, other: "Pose") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def heading_error(self, other: "Pose") -> float:
        return abs(angle_difference(self.theta, other.theta))


@dataclass(frozen=True)
class BezierCurve:
    """Polynomial curve of arbitrary degree >= 1 defined by its control points."""

    control_points: tuple[Point, ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.control_points)
        if len(pts) < 2:
            raise InvalidInput("a Bezier curve needs at least 2 control points")
        x0, y0 = pts[0]
        if all(math.hypot(x - x0, y - y0) < 1e-12 for x, y in pts):
            raise InvalidInput("degenerate zero-length curve: all control points coincide")
        object.__setattr__(self, "control_points", pts)

    @property
    def degree(self) -> int:
        return len(self.control_points) - 1

    def reversed(self) -> "BezierCurve":
        """Same geometry traversed from the far end (t -> 1 - t)."""
        return BezierCurve(tuple(reversed(self.control_points)))


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its ordered vertices; the last edge closes it."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise InvalidInput("a polygon needs at least 3 vertices")
        for i in range(len(verts)):
            if verts[i] == verts[(i + 1) % len(verts)]:
                raise InvalidInput(f"consecutive polygon vertices {i} and {i + 1} coincide")
        object.__setattr__(self, "vertices", verts)


@dataclass(frozen=True)
class VehicleParams:
    """Rectangular vehicle: outer dimensions, reference-point offset, turning limit."""

    length: float
    width: float
    ref_offset: float = 0.0
    min_turn_radius: float = 1.0

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise InvalidInput("vehicle length and width must be positive")
        if self.min_turn_radius <= 0:
            raise InvalidInput("min_turn_radius must be positive")


def _check_t(t: float) -> None:
    if not (0.0 <= t <= 1.0):
        raise InvalidInput(f"curve parameter must lie in [0, 1], got {t!r}")


def _de_casteljau(points: Sequence[Point], t: float) -> Point:
    pts = list(points)
    while len(pts) > 1:
        pts = [
            (
                (1.0 - t) * pts[i][0] + t * pts[i + 1][0],
                (1.0 - t) * pts[i][1] + t * pts[i + 1][1],
            )
            for i in range(len(pts) - 1)
        ]
    return pts[0]


def _hodograph(points: Sequence[Point]) -> tuple[Point, ...]:
    n = len(points) - 1
    return tuple(
        (n * (points[i + 1][0] - points[i][0]), n * (points[i + 1][1] - points[i][1]))
        for i in range(n)
    )


def bezier_point(c: BezierCurve, t: float) -> Point:
    """Evaluate the curve at parameter t by de Casteljau's scheme."""
    _check_t(t)
    return _de_casteljau(c.control_points, t)


def bezier_derivatives(c: BezierCurve, t: float) -> tuple[Point, Point]:
    """First and second derivative vectors at t (second is zero for degree 1)."""
    _check_t(t)
    d1_pts = _hodograph(c.control_points)
    d1 = _de_casteljau(d1_pts, t) if len(d1_pts) > 1 else d1_pts[0]
    if len(d1_pts) < 2:
        return d1, (0.0, 0.0)
    d2_pts = _hodograph(d1_pts)
    d2 = _de_casteljau(d2_pts, t) if len(d2_pts) > 1 else d2_pts[0]
    return d1, d2


def bezier_curvature(c: BezierCurve, t: float) -> float:
    """Signed curvature at t; positive means turning left with increasing t."""
    (dx, dy), (ddx, ddy) = bezier_derivatives(c, t)
    speed2 = dx * dx + dy * dy
    if speed2 < _TANGENT_EPS2:
        raise DegenerateTangent(f"first derivative vanishes at t={t}")
    return (dx * ddy - dy * ddx) / speed2 ** 1.5


def bezier_tangent_angle(c: BezierCurve, t: float) -> float:
    """Tangent direction at t, probing inward when the derivative vanishes."""
    _check_t(t)
    d1, _ = bezier_derivatives(c, t)
    if d1[0] * d1[0] + d1[1] * d1[1] >= _TANGENT_EPS2:
        return math.atan2(d1[1], d1[0])
    # vanishing derivative (coincident control points at an end): take the limit
    # direction by stepping toward the interior
    step = 1e-7
    while step < 0.1:
        tt = min(t + step, 1.0) if t < 0.5 else max(t - step, 0.0)
        d1, _ = bezier_derivatives(c, tt)
        if d1[0] * d1[0] + d1[1] * d1[1] >= _TANGENT_EPS2:
            return math.atan2(d1[1], d1[0])
        step *= 10.0
    raise DegenerateTangent(f"no usable tangent near t={t}")


def bezier_max_abs_curvature(c: BezierCurve, samples: int = 201) -> float:
    """Max |curvature| over a uniform parameter grid, skipping degenerate spots."""
    worst = 0.0
    for i in range(samples):
        t = i / (samples - 1)
        try:
            worst = max(worst, abs(bezier_curvature(c, t)))
        except DegenerateTangent:
            continue
    return worst


def _chord_table(c: BezierCurve, n: int) -> tuple[list[float], list[float]]:
    """Parameters and cumulative chord lengths over a dense uniform grid."""
    ts = [i / n for i in range(n + 1)]
    pts = [_de_casteljau(c.control_points, t) for t in ts]
    cum = [0.0]
    for i in range(n):
        cum.append(cum[-1] + math.hypot(pts[i + 1][0] - pts[i][0], pts[i + 1][1] - pts[i][1]))
    return ts, cum


def bezier_length(c: BezierCurve, n: int = 512) -> float:
    """Chord-sum approximation of the curve's arc length."""
    return _chord_table(c, n)[1][-1]


def sample_bezier(
    c: BezierCurve, ds: float, direction: Direction = Direction.FORWARD
) -> list[tuple[Pose, Direction]]:
    """Sample the curve at arc-length spacing <= ds (chord approximation).

    The first/last samples sit exactly at t=0 and t=1.  Headings follow the
    tangent for forward travel and are flipped by pi for reverse travel.
    """
    if ds <= 0:
        raise InvalidInput(f"sample spacing must be positive, got {ds!r}")
    coarse_len = bezier_length(c, 256)
    if coarse_len < 1e-12:
        raise DegenerateTangent("cannot sample a zero-length curve")
    n_steps = max(1, math.ceil(coarse_len / ds))
    dense = max(512, 16 * n_steps)
    ts, cum = _chord_table(c, dense)
    total = cum[-1]

    flip = math.pi if direction is Direction.REVERSE else 0.0
    out: list[tuple[Pose, Direction]] = []
    j = 0
    for k in range(n_steps + 1):
        if k == 0:
            t = 0.0
        elif k == n_steps:
            t = 1.0
        else:
            target = total * k / n_steps
            while cum[j + 1] < target:
                j += 1
            span = cum[j + 1] - cum[j]
            frac = 0.0 if span <= 0.0 else (target - cum[j]) / span
            t = ts[j] + frac * (ts[j + 1] - ts[j])
        x, y = _de_casteljau(c.control_points, t)
        theta = bezier_tangent_angle(c, t) + flip
        out.append((Pose(x, y, theta), direction))
    return out


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if abs(cross) > _BOUNDARY_EPS * max(1.0, abs(x2 - x1) + abs(y2 - y1)):
        return False
    return (
        min(x1, x2) - _BOUNDARY_EPS <= px <= max(x1, x2) + _BOUNDARY_EPS
        and min(y1, y2) - _BOUNDARY_EPS <= py <= max(y1, y2) + _BOUNDARY_EPS
    )


def point_in_polygon_even_odd(p: Point, poly: Polygon) -> bool:
    """Even-Odd containment: cast a ray and count edge crossings; odd = inside.

    Boundary points count as inside so that nodes drawn on a zone border are
    still located in that zone.
    """
    px, py = p
    verts = poly.vertices
    n = len(verts)
    inside = False
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if _on_segment(px, py, x1, y1, x2, y2):
            return True
        # half-open rule keeps vertex-hitting rays consistent
        if (y1 > py) != (y2 > py):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_at:
                inside = not inside
    return inside


def footprint_corners(p: Pose, v: VehicleParams) -> tuple[Point, Point, Point, Point]:
    """Corners of the oriented vehicle rectangle: FL, FR, RR, RL order."""
    cos_t, sin_t = math.cos(p.theta), math.sin(p.theta)
    cx = p.x + v.ref_offset * cos_t
    cy = p.y + v.ref_offset * sin_t
    hl, hw = v.length / 2.0, v.width / 2.0
    local = ((hl, hw), (hl, -hw), (-hl, -hw), (-hl, hw))
    return tuple(
        (cx + lx * cos_t - ly * sin_t, cy + lx * sin_t + ly * cos_t) for lx, ly in local
    )  # type: ignore[return-value]
