"""Plant model: rectangular zones, topological graph, and the Bezier segment roadmap.

Provides area location, Dijkstra area routing, corridor path extraction,
waypoint generation, machine entry/exit lookup, and roadmap validation.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import (
    InvalidInput,
    NoRouteError,
    OutsideAllZones,
    RoadmapIncomplete,
    UnknownNode,
)
from .geometry import (
    BezierCurve,
    Direction,
    Point,
    Polygon,
    Pose,
    VehicleParams,
    angle_difference,
    bezier_max_abs_curvature,
    bezier_tangent_angle,
    point_in_polygon_even_odd,
    sample_bezier,
)
from .grid_map import GridMap, default_margin, distance_field, footprint_collides
from .paths import Path, Provenance

_JOIN_TOL = 1e-6  # positional coincidence required of chained curve endpoints
TANGENT_TOL = 1e-2  # allowed tangent mismatch (rad, mod pi) at shared endpoints


class ZoneKind(Enum):
    MACHINE_AREA = "machine_area"
    CORRIDOR = "corridor"


class SegmentRole(Enum):
    CORRIDOR = "corridor"
    MACHINE_ENTRY = "machine_entry"
    MACHINE_EXIT = "machine_exit"


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle in meters."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidInput(f"rectangle must have positive area, got {self}")

    @property
    def center(self) -> Point:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def as_polygon(self) -> Polygon:
        return Polygon(
            ((self.x0, self.y0), (self.x1, self.y0), (self.x1, self.y1), (self.x0, self.y1))
        )


@dataclass(frozen=True)
class RectZone:
    id: str
    kind: ZoneKind
    rect: Rect


@dataclass(frozen=True)
class TopoEdge:
    """Adjacency between two zones with the free opening on their shared border."""

    a: str
    b: str
    weight: float
    connection: tuple[Point, Point]

    def __post_init__(self):
        if self.a == self.b:
            raise InvalidInput(f"edge connects zone {self.a!r} to itself")
        if self.weight <= 0:
            raise InvalidInput(f"edge {self.a!r}~{self.b!r} weight must be positive")
        (x1, y1), (x2, y2) = self.connection
        if math.hypot(x2 - x1, y2 - y1) < 1e-9:
            raise InvalidInput(f"edge {self.a!r}~{self.b!r} connection interval is a point")


@dataclass(frozen=True, eq=False)
class TopologicalGraph:
    """Zones in declaration order plus weighted adjacency edges."""

    zones: tuple[RectZone, ...]
    edges: tuple[TopoEdge, ...]

    def __post_init__(self):
        ids = [z.id for z in self.zones]
        if len(set(ids)) != len(ids):
            raise InvalidInput("zone ids must be unique")
        known = set(ids)
        for e in self.edges:
            if e.a not in known or e.b not in known:
                raise InvalidInput(f"edge {e.a!r}~{e.b!r} references an unknown zone")

    def zone_by_id(self, zone_id: str) -> RectZone:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise NoRouteError(f"unknown zone {zone_id!r}")

    def neighbors(self, zone_id: str) -> list[tuple[str, TopoEdge]]:
        out = []
        for e in self.edges:
            if e.a == zone_id:
                out.append((e.b, e))
            elif e.b == zone_id:
                out.append((e.a, e))
        return out

    def edge_between(self, a: str, b: str) -> Optional[TopoEdge]:
        for e in self.edges:
            if {e.a, e.b} == {a, b}:
                return e
        return None


@dataclass(frozen=True)
class SegmentEndpoint:
    id: int
    pose: Pose


@dataclass(frozen=True)
class BezierSegment:
    """A fixed roadmap curve with travel direction and endpoint ids."""

    curve: BezierCurve
    direction: Direction
    start_ep: int
    end_ep: int
    role: SegmentRole
    zone: str


@dataclass(frozen=True)
class MachineNode:
    """Docking pose at a machine plus its fixed exit and entry chains."""

    id: int
    pose: Pose
    exit_chain: tuple[int, ...]
    entry_chain: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SegmentGraph:
    """Roadmap: endpoints, segments, machine nodes; adjacency is derived from
    endpoint-id equality, never stored."""

    endpoints: tuple[SegmentEndpoint, ...]
    segments: tuple[BezierSegment, ...]
    machine_nodes: tuple[MachineNode, ...]
    sample_step: float = 0.05

    def __post_init__(self):
        if self.sample_step <= 0:
            raise InvalidInput("sample_step must be positive")
        ep_ids = [e.id for e in self.endpoints]
        if len(set(ep_ids)) != len(ep_ids):
            raise InvalidInput("endpoint ids must be unique")
        by_id = {e.id: e for e in self.endpoints}
        object.__setattr__(self, "_ep_by_id", by_id)
        for i, seg in enumerate(self.segments):
            for ep_id, cp in (
                (seg.start_ep, seg.curve.control_points[0]),
                (seg.end_ep, seg.curve.control_points[-1]),
            ):
                ep = by_id.get(ep_id)
                if ep is None:
                    raise InvalidInput(f"segment {i} references unknown endpoint {ep_id}")
                if math.hypot(cp[0] - ep.pose.x, cp[1] - ep.pose.y) > _JOIN_TOL:
                    raise InvalidInput(
                        f"segment {i} curve end does not coincide with endpoint {ep_id}"
                    )
            if seg.direction is Direction.REVERSE and seg.role is not SegmentRole.MACHINE_ENTRY:
                raise InvalidInput(
                    f"segment {i} is reverse but not a machine entry segment"
                )
        node_ids = [n.id for n in self.machine_nodes]
        if len(set(node_ids)) != len(node_ids):
            raise InvalidInput("machine node ids must be unique")
        for n in self.machine_nodes:
            if not n.exit_chain or not n.entry_chain:
                raise InvalidInput(f"machine node {n.id} must have exit and entry chains")
            for idx in (*n.exit_chain, *n.entry_chain):
                if not (0 <= idx < len(self.segments)):
                    raise InvalidInput(f"machine node {n.id} references segment {idx}")
        object.__setattr__(self, "_node_by_id", {n.id: n for n in self.machine_nodes})

    def endpoint(self, ep_id: int) -> SegmentEndpoint:
        return self._ep_by_id[ep_id]

    def node(self, node_id: int) -> Optional[MachineNode]:
        return self._node_by_id.get(node_id)

    def segments_at(self, ep_id: int) -> list[int]:
        """Derived adjacency: indices of segments touching this endpoint."""
        return [
            i
            for i, s in enumerate(self.segments)
            if s.start_ep == ep_id or s.end_ep == ep_id
        ]


@dataclass(frozen=True)
class GridMeta:
    pgm_path: str
    resolution: float
    origin: Point
    occupied_threshold: int


@dataclass(frozen=True, eq=False)
class World:
    """The loaded plant: zones + topology + roadmap + vehicle + map metadata."""

    topo: TopologicalGraph
    seg_graph: SegmentGraph
    vehicle: VehicleParams
    grid_meta: GridMeta

    @property
    def zones(self) -> tuple[RectZone, ...]:
        return self.topo.zones


# zone queries ----------------------------------------------------------------


def locate_area(p: Point, topo: TopologicalGraph) -> str:
    """Zone containing p by the Even-Odd test, first declared zone winning ties."""
    for zone in topo.zones:
        if point_in_polygon_even_odd(p, zone.rect.as_polygon()):
            return zone.id
    raise OutsideAllZones(f"point ({p[0]:.3f}, {p[1]:.3f}) lies outside every zone")


def area_sequence(topo: TopologicalGraph, start_area: str, goal_area: str) -> list[str]:
    """Minimum-weight zone route, ties broken by lexicographically smallest ids."""
    topo.zone_by_id(start_area)
    topo.zone_by_id(goal_area)
    if start_area == goal_area:
        return [start_area]

    best: dict[str, tuple[float, tuple[str, ...]]] = {start_area: (0.0, (start_area,))}
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (start_area,))]
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if (cost, path) > best.get(node, (math.inf, ())):
            continue
        if node == goal_area:
            return list(path)
        for nbr, edge in topo.neighbors(node):
            cand = (cost + edge.weight, path + (nbr,))
            if cand < best.get(nbr, (math.inf, ())):
                best[nbr] = cand
                heapq.heappush(heap, cand)
    raise NoRouteError(f"zones {start_area!r} and {goal_area!r} are not connected")


def corridors_sequence(areas: list[str], topo: TopologicalGraph) -> list[str]:
    """Corridor-kind zones of the route, order preserved."""
    out = []
    for zone_id in areas:
        if topo.zone_by_id(zone_id).kind is ZoneKind.CORRIDOR:
            out.append(zone_id)
    return out


# chain following -------------------------------------------------------------


def _orient_for_travel(
    seg: BezierSegment, from_point: Point
) -> tuple[BezierCurve, Direction]:
    """Curve reparameterized so travel starts at from_point; direction preserved."""
    first = seg.curve.control_points[0]
    last = seg.curve.control_points[-1]
    if math.hypot(first[0] - from_point[0], first[1] - from_point[1]) <= _JOIN_TOL:
        return seg.curve, seg.direction
    if math.hypot(last[0] - from_point[0], last[1] - from_point[1]) <= _JOIN_TOL:
        return seg.curve.reversed(), seg.direction
    raise RoadmapIncomplete(
        f"segment between endpoints {seg.start_ep} and {seg.end_ep} does not touch "
        f"({from_point[0]:.3f}, {from_point[1]:.3f})"
    )


def _sample_chain(
    oriented: list[tuple[BezierCurve, Direction]], ds: float
) -> list[tuple[Pose, Direction]]:
    """Concatenated samples of travel-oriented curves.

    Same-direction joint duplicates are dropped; at a cusp (direction change)
    both coincident seam samples stay so the switch lands exactly on the shared
    endpoint.
    """
    out: list[tuple[Pose, Direction]] = []
    for curve, direction in oriented:
        samples = sample_bezier(curve, ds, direction)
        if out and samples:
            prev_pose, prev_dir = out[-1]
            if prev_dir is direction and prev_pose.distance_to(samples[0][0]) <= 1e-9:
                samples = samples[1:]
        out.extend(samples)
    return out


def _fixed_chain_path(
    seg_graph: SegmentGraph,
    chain: tuple[int, ...],
    anchor: Point,
    anchor_at_start: bool,
    what: str,
) -> Path:
    """Sampled path of a machine chain anchored at the node pose."""
    segs = [seg_graph.segments[i] for i in chain]
    oriented: list[tuple[BezierCurve, Direction]] = []
    if anchor_at_start:
        cur = anchor
        for seg in segs:
            curve, direction = _orient_for_travel(seg, cur)
            oriented.append((curve, direction))
            cur = curve.control_points[-1]
    else:
        cur = anchor
        backwards: list[tuple[BezierCurve, Direction]] = []
        for seg in reversed(segs):
            first = seg.curve.control_points[0]
            last = seg.curve.control_points[-1]
            if math.hypot(last[0] - cur[0], last[1] - cur[1]) <= _JOIN_TOL:
                curve = seg.curve
            elif math.hypot(first[0] - cur[0], first[1] - cur[1]) <= _JOIN_TOL:
                curve = seg.curve.reversed()
            else:
                raise RoadmapIncomplete(
                    f"{what}: segment between endpoints {seg.start_ep} and {seg.end_ep} "
                    f"does not reach ({cur[0]:.3f}, {cur[1]:.3f})"
                )
            backwards.append((curve, seg.direction))
            cur = curve.control_points[0]
        oriented = list(reversed(backwards))
    samples = _sample_chain(oriented, seg_graph.sample_step)
    return Path.from_samples(samples, Provenance.FIXED_SEGMENT)


def find_exit_path(q_start_node: int, seg_graph: SegmentGraph) -> tuple[Path, Pose]:
    """Fixed path leaving the machine; returns it with the detachment pose."""
    node = seg_graph.node(q_start_node)
    if node is None:
        raise UnknownNode(f"machine node {q_start_node} does not exist")
    if not node.exit_chain:
        raise RoadmapIncomplete(f"machine node {q_start_node} has no exit chain")
    path = _fixed_chain_path(
        seg_graph, node.exit_chain, node.pose.position, True, f"exit of node {q_start_node}"
    )
    return path, path.end


def find_entry_path(q_goal_node: int, seg_graph: SegmentGraph) -> tuple[Path, Pose]:
    """Fixed path into the machine; returns it with the attach pose (its first pose)."""
    node = seg_graph.node(q_goal_node)
    if node is None:
        raise UnknownNode(f"machine node {q_goal_node} does not exist")
    if not node.entry_chain:
        raise RoadmapIncomplete(f"machine node {q_goal_node} has no entry chain")
    path = _fixed_chain_path(
        seg_graph, node.entry_chain, node.pose.position, False, f"entry of node {q_goal_node}"
    )
    return path, path.start


# corridors -------------------------------------------------------------------


def _corridor_walk(seg_graph: SegmentGraph, zone_id: str) -> list[int]:
    """Corridor segments of a zone ordered into a single chain (authored sense)."""
    idxs = [
        i
        for i, s in enumerate(seg_graph.segments)
        if s.role is SegmentRole.CORRIDOR and s.zone == zone_id
    ]
    if not idxs:
        raise RoadmapIncomplete(f"corridor {zone_id!r} has no centerline segments")
    if len(idxs) == 1:
        return idxs

    degree: dict[int, list[int]] = {}
    for i in idxs:
        s = seg_graph.segments[i]
        degree.setdefault(s.start_ep, []).append(i)
        degree.setdefault(s.end_ep, []).append(i)
    ends = sorted(ep for ep, touching in degree.items() if len(touching) == 1)
    if len(ends) != 2 or any(len(t) > 2 for t in degree.values()):
        raise RoadmapIncomplete(
            f"corridor {zone_id!r} segments do not form a single chain"
        )

    walk: list[int] = []
    ep = ends[0]
    used: set[int] = set()
    while len(walk) < len(idxs):
        nxt = next(i for i in degree[ep] if i not in used)
        used.add(nxt)
        walk.append(nxt)
        s = seg_graph.segments[nxt]
        ep = s.end_ep if s.start_ep == ep else s.start_ep
    return walk


def _walk_end_positions(seg_graph: SegmentGraph, walk: list[int]) -> tuple[Point, Point]:
    first_seg = seg_graph.segments[walk[0]]
    last_seg = seg_graph.segments[walk[-1]]
    if len(walk) == 1:
        return first_seg.curve.control_points[0], first_seg.curve.control_points[-1]
    second = seg_graph.segments[walk[1]]
    shared_first = {first_seg.start_ep, first_seg.end_ep} & {second.start_ep, second.end_ep}
    start_ep = ({first_seg.start_ep, first_seg.end_ep} - shared_first).pop()
    before_last = seg_graph.segments[walk[-2]]
    shared_last = {last_seg.start_ep, last_seg.end_ep} & {
        before_last.start_ep,
        before_last.end_ep,
    }
    end_ep = ({last_seg.start_ep, last_seg.end_ep} - shared_last).pop()
    return (
        seg_graph.endpoint(start_ep).pose.position,
        seg_graph.endpoint(end_ep).pose.position,
    )


def corridors_path(
    corridors: list[str],
    seg_graph: SegmentGraph,
    approach: Optional[Point] = None,
) -> tuple[list[Path], list[Pose]]:
    """Centerline chains for the corridors in travel order plus their end poses.

    Chains authored against the travel direction are re-oriented: control points
    reversed, headings thereby flipped by pi, travel-direction flags preserved.
    The optional approach point (normally the detachment pose position) anchors
    the first chain's orientation; later chains follow the previous chain's end.
    """
    walks = [_corridor_walk(seg_graph, zone_id) for zone_id in corridors]
    end_positions = [_walk_end_positions(seg_graph, w) for w in walks]

    paths: list[Path] = []
    endpoints: list[Pose] = []
    prev: Optional[Point] = approach
    for k, walk in enumerate(walks):
        p_first, p_last = end_positions[k]
        if prev is not None:
            flip = math.dist(p_last, prev) < math.dist(p_first, prev)
        elif k + 1 < len(walks):
            nxt_a, nxt_b = end_positions[k + 1]
            d_first = min(math.dist(p_first, nxt_a), math.dist(p_first, nxt_b))
            d_last = min(math.dist(p_last, nxt_a), math.dist(p_last, nxt_b))
            flip = d_first < d_last
        else:
            flip = False
        ordered = list(reversed(walk)) if flip else list(walk)
        start_pos = p_last if flip else p_first

        oriented: list[tuple[BezierCurve, Direction]] = []
        cur = start_pos
        for i in ordered:
            curve, direction = _orient_for_travel(seg_graph.segments[i], cur)
            oriented.append((curve, direction))
            cur = curve.control_points[-1]
        samples = _sample_chain(oriented, seg_graph.sample_step)
        path = Path.from_samples(samples, Provenance.FIXED_SEGMENT)
        paths.append(path)
        endpoints.extend((path.start, path.end))
        prev = path.end.position
    return paths, endpoints


# waypoints -------------------------------------------------------------------


def waypoints_sequence(areas: list[str], topo: TopologicalGraph) -> list[Pose]:
    """One waypoint per consecutive zone pair at the connection-interval midpoint.

    The heading is the shared-border normal pointing from the earlier zone into
    the later one, which lines the vehicle up with the direction of travel.
    """
    out: list[Pose] = []
    for a, b in zip(areas, areas[1:]):
        edge = topo.edge_between(a, b)
        if edge is None:
            raise NoRouteError(f"zones {a!r} and {b!r} share no edge")
        (x1, y1), (x2, y2) = edge.connection
        mx, my = (x1 + x2) / 2.0, (y1 + y2) / 2.0
        nx, ny = -(y2 - y1), x2 - x1
        ca = topo.zone_by_id(a).rect.center
        cb = topo.zone_by_id(b).rect.center
        along = (cb[0] - ca[0]) * nx + (cb[1] - ca[1]) * ny
        if along == 0.0:
            along = (mx - ca[0]) * nx + (my - ca[1]) * ny
        if along < 0.0:
            nx, ny = -nx, -ny
        out.append(Pose(mx, my, math.atan2(ny, nx)))
    return out


# validation ------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    subject: str
    check: str
    value: float
    threshold: float

    def format_line(self) -> str:
        return f"{self.subject} {self.check} value={self.value:.6g} threshold={self.threshold:.6g}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def format_text(self) -> str:
        if self.passed:
            return "roadmap OK: all segments collision-free, curvature-feasible, tangent-continuous"
        return "\n".join(v.format_line() for v in self.violations)


def validate_roadmap(world: World, grid: GridMap) -> ValidationReport:
    """Check every segment for collisions, curvature, and tangent continuity.

    Tangent mismatches are measured mod pi so legitimate forward/reverse cusps
    at shared endpoints pass.  Also cross-checks that every topological edge's
    connection midpoint sits on a free cell.
    """
    seg_graph = world.seg_graph
    vehicle = world.vehicle
    margin = default_margin(grid.resolution)
    df = distance_field(grid)
    kappa_limit = 1.0 / vehicle.min_turn_radius
    violations: list[Violation] = []

    tangents_at: dict[int, list[tuple[int, float]]] = {}
    for i, seg in enumerate(seg_graph.segments):
        label = f"seg{i}[{seg.zone}:{seg.role.value}]"
        samples = sample_bezier(seg.curve, seg_graph.sample_step, seg.direction)
        colliding = sum(
            1 for pose, _d in samples if footprint_collides(pose, vehicle, grid, margin, df)
        )
        if colliding:
            violations.append(Violation(label, "collision", float(colliding), 0.0))
        kappa_max = bezier_max_abs_curvature(seg.curve)
        if kappa_max > kappa_limit + 1e-9:
            violations.append(Violation(label, "curvature", kappa_max, kappa_limit))
        tangents_at.setdefault(seg.start_ep, []).append(
            (i, bezier_tangent_angle(seg.curve, 0.0))
        )
        tangents_at.setdefault(seg.end_ep, []).append(
            (i, bezier_tangent_angle(seg.curve, 1.0))
        )

    for ep_id in sorted(tangents_at):
        entries = tangents_at[ep_id]
        for a in range(len(entries)):
            for b in range(a + 1, len(entries)):
                i, ang_i = entries[a]
                j, ang_j = entries[b]
                delta = abs(angle_difference(ang_i, ang_j))
                delta = min(delta, math.pi - delta)
                if delta > TANGENT_TOL:
                    violations.append(
                        Violation(f"ep{ep_id}:seg{i}~seg{j}", "tangent", delta, TANGENT_TOL)
                    )

    for edge in world.topo.edges:
        (x1, y1), (x2, y2) = edge.connection
        ix, iy = grid.world_to_cell((x1 + x2) / 2.0, (y1 + y2) / 2.0)
        blocked = not grid.in_bounds(ix, iy) or grid.is_occupied(ix, iy)
        if blocked:
            violations.append(
                Violation(f"edge[{edge.a}~{edge.b}]", "connection", 1.0, 0.0)
            )

    return ValidationReport(tuple(violations))
