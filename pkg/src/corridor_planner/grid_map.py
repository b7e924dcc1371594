"""Occupancy grid storage, PGM I/O, footprint collision, distance and cost fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.ndimage import distance_transform_edt
from skimage.graph import MCP_Geometric

from .errors import GoalBlocked, InvalidInput, ParseError
from .geometry import Point, Pose, VehicleParams
from .paths import Path

SQRT2 = math.sqrt(2.0)


def default_margin(resolution: float) -> float:
    """Safety margin compensating cell-center collision sampling."""
    return resolution / SQRT2


@dataclass(frozen=True, eq=False)
class GridMap:
    """Boolean occupancy raster; cell (ix, iy) covers a resolution-sized square.

    Row iy=0 sits at the world-space bottom (y grows upward), regardless of the
    image convention of the source file.
    """

    width: int
    height: int
    resolution: float
    origin: Point
    occupancy: np.ndarray  # shape (height, width), bool, [iy, ix]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidInput("grid dimensions must be at least 1x1")
        if self.resolution <= 0:
            raise InvalidInput("grid resolution must be positive")
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.shape != (self.height, self.width):
            raise InvalidInput(
                f"occupancy shape {occ.shape} does not match {self.height}x{self.width}"
            )
        occ = occ.copy()
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    # world <-> cell helpers -------------------------------------------------

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        return (
            int(math.floor((x - self.origin[0]) / self.resolution)),
            int(math.floor((y - self.origin[1]) / self.resolution)),
        )

    def cell_center(self, ix: int, iy: int) -> Point:
        return (
            self.origin[0] + (ix + 0.5) * self.resolution,
            self.origin[1] + (iy + 0.5) * self.resolution,
        )

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    @property
    def world_bounds(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return (x0, y0, x0 + self.width * self.resolution, y0 + self.height * self.resolution)

    def is_occupied(self, ix: int, iy: int) -> bool:
        return bool(self.occupancy[iy, ix])


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated PGM header/ASCII tokens, skipping comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i : i + 1]
        if c == b"#":
            while i < n and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
                j += 1
            yield i, data[i:j]
            i = j


def load_grid(
    pgm_bytes: bytes,
    resolution: float,
    origin: Point,
    occupied_threshold: int,
) -> GridMap:
    """Parse a P2/P5 PGM into a GridMap; gray < occupied_threshold means occupied.

    Image row 0 is the top of the map, so rows are flipped to make world y grow
    upward.
    """
    tokens = _pgm_tokens(pgm_bytes)
    try:
        _, magic = next(tokens)
    except StopIteration:
        raise ParseError("empty PGM data") from None
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"unsupported PGM magic {magic!r} (want P2 or P5)")

    header: list[int] = []
    last_end = 0
    try:
        while len(header) < 3:
            pos, tok = next(tokens)
            header.append(int(tok))
            last_end = pos + len(tok)
    except StopIteration:
        raise ParseError("truncated PGM header") from None
    except ValueError:
        raise ParseError("non-numeric PGM header field") from None
    width, height, maxval = header
    if width == 0 or height == 0:
        raise InvalidInput("PGM declares zero dimensions")
    if width < 0 or height < 0 or maxval < 1:
        raise ParseError("PGM header fields out of range")
    if maxval > 255:
        raise ParseError(f"PGM maxval {maxval} exceeds 255")

    if magic == b"P2":
        values: list[int] = []
        for _, tok in tokens:
            try:
                values.append(int(tok))
            except ValueError:
                raise ParseError(f"non-numeric PGM sample {tok!r}") from None
        if len(values) != width * height:
            raise ParseError(
                f"PGM sample count {len(values)} does not match {width}x{height}"
            )
        raster = np.array(values, dtype=np.int64).reshape(height, width)
    else:
        # binary raster starts after exactly one whitespace byte past maxval
        start = last_end + 1
        raster_bytes = pgm_bytes[start : start + width * height]
        if len(raster_bytes) != width * height:
            raise ParseError("truncated P5 raster")
        raster = np.frombuffer(raster_bytes, dtype=np.uint8).astype(np.int64)
        raster = raster.reshape(height, width)
    if raster.max(initial=0) > maxval:
        raise ParseError("PGM sample exceeds declared maxval")

    occupied = raster < occupied_threshold
    return GridMap(
        width=width,
        height=height,
        resolution=resolution,
        origin=origin,
        occupancy=occupied[::-1, :],  # flip: image top row -> highest world y
    )


def emit_pgm(g: GridMap) -> bytes:
    """Serialize occupancy back to a binary PGM (occupied=0, free=255)."""
    raster = np.where(g.occupancy[::-1, :], 0, 255).astype(np.uint8)
    header = f"P5\n{g.width} {g.height}\n255\n".encode("ascii")
    return header + raster.tobytes()


# collision checking ---------------------------------------------------------


def footprint_collides(
    p: Pose,
    v: VehicleParams,
    g: GridMap,
    margin: float,
    df: Optional["DistanceField"] = None,
) -> bool:
    """True iff any occupied cell center falls inside the margin-inflated footprint.

    Poses whose inflated footprint extends beyond the map boundary collide.
    A precomputed distance field enables conservative fast accept/reject tiers
    that agree exactly with the cell-by-cell test.
    """
    hl = v.length / 2.0 + margin
    hw = v.width / 2.0 + margin
    cos_t, sin_t = math.cos(p.theta), math.sin(p.theta)
    cx = p.x + v.ref_offset * cos_t
    cy = p.y + v.ref_offset * sin_t
    x0, y0, x1, y1 = g.world_bounds

    if df is not None:
        ix = int((cx - x0) / g.resolution)
        iy = int((cy - y0) / g.resolution)
        if 0 <= ix < g.width and 0 <= iy < g.height:
            d = df.values[iy, ix]
            half_diag = g.resolution * SQRT2 / 2.0
            r_out = math.hypot(hl, hw)
            if d - half_diag > r_out + 1e-9:
                # no occupied center can reach the rectangle; stay in bounds too?
                if (
                    cx - x0 >= r_out
                    and x1 - cx >= r_out
                    and cy - y0 >= r_out
                    and y1 - cy >= r_out
                ):
                    return False
            elif d + half_diag < min(hl, hw) - 1e-9:
                return True  # an occupied center sits inside the inscribed disc

    corners = (
        (cx + hl * cos_t - hw * sin_t, cy + hl * sin_t + hw * cos_t),
        (cx + hl * cos_t + hw * sin_t, cy + hl * sin_t - hw * cos_t),
        (cx - hl * cos_t + hw * sin_t, cy - hl * sin_t - hw * cos_t),
        (cx - hl * cos_t - hw * sin_t, cy - hl * sin_t + hw * cos_t),
    )
    for qx, qy in corners:
        if not (x0 <= qx <= x1 and y0 <= qy <= y1):
            return True

    min_x = min(q[0] for q in corners)
    max_x = max(q[0] for q in corners)
    min_y = min(q[1] for q in corners)
    max_y = max(q[1] for q in corners)
    ix_lo = max(0, int(math.floor((min_x - g.origin[0]) / g.resolution - 0.5)))
    ix_hi = min(g.width - 1, int(math.ceil((max_x - g.origin[0]) / g.resolution - 0.5)))
    iy_lo = max(0, int(math.floor((min_y - g.origin[1]) / g.resolution - 0.5)))
    iy_hi = min(g.height - 1, int(math.ceil((max_y - g.origin[1]) / g.resolution - 0.5)))

    occ = g.occupancy
    res = g.resolution
    ox, oy = g.origin
    for iy in range(iy_lo, iy_hi + 1):
        row = occ[iy]
        py = oy + (iy + 0.5) * res - cy
        for ix in range(ix_lo, ix_hi + 1):
            if not row[ix]:
                continue
            px = ox + (ix + 0.5) * res - cx
            u = px * cos_t + py * sin_t
            if abs(u) > hl:
                continue
            w = -px * sin_t + py * cos_t
            if abs(w) <= hw:
                return True
    return False


def path_collides(
    path: Path,
    v: VehicleParams,
    g: GridMap,
    margin: float,
    df: Optional["DistanceField"] = None,
) -> Optional[int]:
    """Index of the first colliding pose along the path, or None if all clear."""
    for i, pt in enumerate(path.points):
        if footprint_collides(pt.pose, v, g, margin, df):
            return i
    return None


# distance and cost fields ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Per-cell Euclidean distance (meters) to the nearest occupied cell center."""

    resolution: float
    origin: Point
    values: np.ndarray  # shape (height, width), float, +inf when map is empty

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def at_point(self, x: float, y: float) -> float:
        iy = int(math.floor((y - self.origin[1]) / self.resolution))
        ix = int(math.floor((x - self.origin[0]) / self.resolution))
        iy = min(max(iy, 0), self.values.shape[0] - 1)
        ix = min(max(ix, 0), self.values.shape[1] - 1)
        return float(self.values[iy, ix])


def distance_field(g: GridMap) -> DistanceField:
    """Exact Euclidean distance transform; occupied cells carry distance 0."""
    if not g.occupancy.any():
        values = np.full((g.height, g.width), np.inf)
    else:
        values = distance_transform_edt(~g.occupancy, sampling=g.resolution)
    return DistanceField(resolution=g.resolution, origin=g.origin, values=values)


@dataclass(frozen=True, eq=False)
class CostField:
    """8-connected shortest-path distance (meters) to a goal cell through free cells."""

    resolution: float
    origin: Point
    goal_cell: tuple[int, int]
    values: np.ndarray  # shape (height, width), float, +inf unreachable

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def at_cell(self, ix: int, iy: int) -> float:
        if 0 <= iy < self.values.shape[0] and 0 <= ix < self.values.shape[1]:
            return float(self.values[iy, ix])
        return math.inf

    def at_point(self, x: float, y: float) -> float:
        return self.at_cell(
            int(math.floor((x - self.origin[0]) / self.resolution)),
            int(math.floor((y - self.origin[1]) / self.resolution)),
        )


def holonomic_cost_field(
    g: GridMap,
    goal: Pose,
    v: VehicleParams,
    df: Optional[DistanceField] = None,
) -> CostField:
    """Dijkstra cost-to-goal over cells where a disc of radius width/2 fits.

    Conservative disc gating keeps the field admissible-in-spirit for the real
    footprint; the goal cell itself is always seeded so docking poses right next
    to machines still receive guidance.
    """
    gx, gy = g.world_to_cell(goal.x, goal.y)
    if not g.in_bounds(gx, gy):
        raise GoalBlocked(f"goal cell ({gx}, {gy}) is outside the map")
    if g.is_occupied(gx, gy):
        raise GoalBlocked(f"goal cell ({gx}, {gy}) is occupied")

    if df is None:
        df = distance_field(g)
    blocked = g.occupancy | (df.values < v.width / 2.0)
    blocked[gy, gx] = False

    costs = np.where(blocked, np.inf, 1.0)
    mcp = MCP_Geometric(costs, fully_connected=True)
    cumulative, _ = mcp.find_costs(starts=[(gy, gx)])
    return CostField(
        resolution=g.resolution,
        origin=g.origin,
        goal_cell=(gx, gy),
        values=cumulative * g.resolution,
    )
