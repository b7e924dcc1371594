"""Composite planners: fixed roadmap/waypoint guidance stitched with Hybrid A*."""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import DiscontinuousJoin, InvalidInput, NoPathFound, UnknownNode
from .geometry import Pose
from .grid_map import GridMap, distance_field
from .hybrid_astar import PlanOutcome, SearchParams, plan_with_stats
from .paths import Path, PathPoint
from .world_model import (
    World,
    area_sequence,
    corridors_path,
    corridors_sequence,
    find_entry_path,
    find_exit_path,
    locate_area,
    waypoints_sequence,
)

log = logging.getLogger("corridor_planner.planners")

# joins that must land exactly on a fixed-path pose (analytic expansion closes
# them); waypoint joins stay at 2x the configured tolerances
FIXED_JOIN_XY_TOL = 1e-3
FIXED_JOIN_THETA_TOL = 1e-2


class PlannerKind(Enum):
    HYBRID_ASTAR = "hybrid_astar"
    ROADMAP = "roadmap"
    WAYPOINT = "waypoint"


class PartKind(Enum):
    EXIT = "exit"
    HYBRID = "hybrid"
    CORRIDOR = "corridor"
    ENTRY = "entry"


@dataclass(frozen=True)
class PlanRequest:
    start_node: int
    goal_node: int
    planner: PlannerKind = PlannerKind.ROADMAP
    overrides: Optional[dict] = None


@dataclass(frozen=True)
class PathPart:
    kind: PartKind
    start: int
    stop: int  # exclusive


@dataclass(frozen=True)
class Metrics:
    length: float
    direction_switches: int
    max_abs_curvature: float
    min_clearance: float
    planning_time: float
    expansions: int


@dataclass(frozen=True)
class PlanResult:
    path: Path
    metrics: Metrics
    parts: tuple[PathPart, ...]
    join_count: int
    h_witnesses: tuple[tuple[float, float], ...]  # (h_start, cost) per hybrid join


def search_params_from_overrides(overrides: Optional[dict]) -> SearchParams:
    """SearchParams with per-request overrides applied to the defaults."""
    if not overrides:
        return SearchParams()
    valid = {f.name for f in dataclasses.fields(SearchParams)}
    unknown = set(overrides) - valid
    if unknown:
        raise InvalidInput(f"unknown search parameter overrides: {sorted(unknown)}")
    clean = dict(overrides)
    if "steering_set" in clean and clean["steering_set"] is not None:
        clean["steering_set"] = tuple(float(k) for k in clean["steering_set"])
    return SearchParams(**clean)


# concatenation ---------------------------------------------------------------


def _concat(parts: list[Path]) -> tuple[list[PathPoint], list[tuple[int, int]]]:
    points: list[PathPoint] = []
    spans: list[tuple[int, int]] = []
    for k, part in enumerate(parts):
        pts = list(part.points)
        if points:
            gap = points[-1].pose.distance_to(pts[0].pose)
            if gap > 1e-3:
                raise DiscontinuousJoin(k - 1, gap)
            if gap <= 1e-6:
                pts = pts[1:]  # collapse the duplicated join pose
        start = len(points)
        points.extend(pts)
        spans.append((start, len(points)))
    return points, spans


def concat_paths(parts: list[Path]) -> Path:
    """Join path parts whose seams coincide; duplicated join poses collapse."""
    if not parts:
        raise InvalidInput("cannot concatenate zero path parts")
    points, _spans = _concat(parts)
    return Path(tuple(points))


def _assemble(labeled: list[tuple[PartKind, Path]]) -> tuple[Path, tuple[PathPart, ...]]:
    points, spans = _concat([p for _k, p in labeled])
    parts = tuple(
        PathPart(kind, start, stop)
        for (kind, _p), (start, stop) in zip(labeled, spans)
        if stop > start
    )
    return Path(tuple(points)), parts


# metrics ---------------------------------------------------------------------


def path_metrics(path: Path, grid: GridMap) -> Metrics:
    """Geometric path metrics; planning_time and expansions are filled by callers."""
    pts = path.points
    max_kappa = 0.0
    for a, b, c in zip(pts, pts[1:], pts[2:]):
        if a.direction is not b.direction or b.direction is not c.direction:
            continue  # cusps are direction changes, not path curvature
        ax, ay = a.pose.x, a.pose.y
        bx, by = b.pose.x, b.pose.y
        cx, cy = c.pose.x, c.pose.y
        d_ab = math.hypot(bx - ax, by - ay)
        d_bc = math.hypot(cx - bx, cy - by)
        d_ac = math.hypot(cx - ax, cy - ay)
        if d_ab < 1e-9 or d_bc < 1e-9 or d_ac < 1e-9:
            continue
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        kappa = 2.0 * abs(cross) / (d_ab * d_bc * d_ac)
        if kappa > max_kappa:
            max_kappa = kappa

    df = distance_field(grid)
    clearance = min(df.at_point(p.pose.x, p.pose.y) for p in pts)
    return Metrics(
        length=path.length(),
        direction_switches=path.direction_switches(),
        max_abs_curvature=max_kappa,
        min_clearance=clearance,
        planning_time=0.0,
        expansions=0,
    )


# composite planners ----------------------------------------------------------


def _prelude(req: PlanRequest, world: World):
    if req.start_node == req.goal_node:
        raise InvalidInput("composite planners need distinct start and goal nodes")
    seg = world.seg_graph
    start_node = seg.node(req.start_node)
    goal_node = seg.node(req.goal_node)
    if start_node is None:
        raise UnknownNode(f"machine node {req.start_node} does not exist")
    if goal_node is None:
        raise UnknownNode(f"machine node {req.goal_node} does not exist")
    exit_path, detachment = find_exit_path(req.start_node, seg)
    entry_path, attach = find_entry_path(req.goal_node, seg)
    start_area = locate_area(start_node.pose.position, world.topo)
    goal_area = locate_area(goal_node.pose.position, world.topo)
    return exit_path, detachment, entry_path, attach, start_area, goal_area


class _Joiner:
    """Runs hybrid joins, accumulating expansions and admissibility witnesses."""

    def __init__(self, world: World, grid: GridMap, base: SearchParams):
        self.world = world
        self.grid = grid
        self.base = base
        self.expansions = 0
        self.witnesses: list[tuple[float, float]] = []
        self.count = 0

    def join(self, start: Pose, goal: Pose, label: str, tight: bool) -> Path:
        if tight:
            params = dataclasses.replace(
                self.base,
                goal_xy_tol=FIXED_JOIN_XY_TOL,
                goal_theta_tol=FIXED_JOIN_THETA_TOL,
            )
        else:
            params = dataclasses.replace(
                self.base,
                goal_xy_tol=2.0 * self.base.goal_xy_tol,
                goal_theta_tol=2.0 * self.base.goal_theta_tol,
            )
        try:
            outcome: PlanOutcome = plan_with_stats(
                start, goal, self.grid, self.world.vehicle, params
            )
        except NoPathFound as exc:
            raise NoPathFound(f"hybrid join {label} failed: {exc}") from exc
        self.expansions += outcome.expansions
        self.witnesses.append((outcome.h_start, outcome.cost))
        self.count += 1
        log.debug(
            "join %s: %d points, %d expansions", label, len(outcome.path), outcome.expansions
        )
        return outcome.path


def _finish(
    labeled: list[tuple[PartKind, Path]],
    grid: GridMap,
    joiner: _Joiner,
    t0: float,
) -> PlanResult:
    path, parts = _assemble(labeled)
    metrics = dataclasses.replace(
        path_metrics(path, grid),
        planning_time=time.perf_counter() - t0,
        expansions=joiner.expansions,
    )
    return PlanResult(
        path=path,
        metrics=metrics,
        parts=parts,
        join_count=joiner.count,
        h_witnesses=tuple(joiner.witnesses),
    )


def roadmap_hybrid_astar(req: PlanRequest, world: World, grid: GridMap) -> PlanResult:
    """Exit chain, corridor centerlines bridged by Hybrid A*, entry chain.

    Crossing k corridors produces k corridor parts and k+1 hybrid joins: the
    detachment pose links to the first corridor endpoint, even-indexed endpoints
    link to the following odd-indexed ones, and the last endpoint links to the
    attach pose.  Same-area requests collapse to one detachment-attach join.
    """
    t0 = time.perf_counter()
    base = search_params_from_overrides(req.overrides)
    exit_path, detachment, entry_path, attach, start_area, goal_area = _prelude(req, world)
    joiner = _Joiner(world, grid, base)
    labeled: list[tuple[PartKind, Path]] = [(PartKind.EXIT, exit_path)]

    if start_area != goal_area:
        areas = area_sequence(world.topo, start_area, goal_area)
        corridors = corridors_sequence(areas, world.topo)
        corridor_paths, endpoints = corridors_path(
            corridors, world.seg_graph, approach=detachment.position
        )
        if not corridor_paths:
            # adjacent zones without any corridor between them: single join
            labeled.append(
                (PartKind.HYBRID, joiner.join(detachment, attach, "detachment->attach", True))
            )
        else:
            labeled.append(
                (PartKind.HYBRID, joiner.join(detachment, endpoints[0], "detachment->EP1", True))
            )
            labeled.append((PartKind.CORRIDOR, corridor_paths[0]))
            for k in range(1, len(corridor_paths)):
                label = f"EP{2 * k}->EP{2 * k + 1}"
                labeled.append(
                    (
                        PartKind.HYBRID,
                        joiner.join(endpoints[2 * k - 1], endpoints[2 * k], label, True),
                    )
                )
                labeled.append((PartKind.CORRIDOR, corridor_paths[k]))
            labeled.append(
                (
                    PartKind.HYBRID,
                    joiner.join(endpoints[-1], attach, f"EP{len(endpoints)}->attach", True),
                )
            )
    else:
        labeled.append(
            (PartKind.HYBRID, joiner.join(detachment, attach, "detachment->attach", True))
        )

    labeled.append((PartKind.ENTRY, entry_path))
    return _finish(labeled, grid, joiner, t0)


def waypoint_hybrid_astar(req: PlanRequest, world: World, grid: GridMap) -> PlanResult:
    """Exit chain, Hybrid A* through zone-border waypoints, entry chain.

    Waypoints are soft intermediate goals (double tolerance); each join starts
    from the pose the previous join actually reached, so the final path stays
    continuous.  The attach join is exact.  With a single waypoint the loop
    degenerates to detachment->W1 and W1->attach.
    """
    t0 = time.perf_counter()
    base = search_params_from_overrides(req.overrides)
    exit_path, detachment, entry_path, attach, start_area, goal_area = _prelude(req, world)
    joiner = _Joiner(world, grid, base)
    labeled: list[tuple[PartKind, Path]] = [(PartKind.EXIT, exit_path)]

    if start_area != goal_area:
        areas = area_sequence(world.topo, start_area, goal_area)
        waypoints = waypoints_sequence(areas, world.topo)
        if not waypoints:
            labeled.append(
                (PartKind.HYBRID, joiner.join(detachment, attach, "detachment->attach", True))
            )
        else:
            part = joiner.join(detachment, waypoints[0], "detachment->W1", False)
            labeled.append((PartKind.HYBRID, part))
            cursor = part.end
            for i in range(1, len(waypoints)):
                part = joiner.join(cursor, waypoints[i], f"W{i}->W{i + 1}", False)
                labeled.append((PartKind.HYBRID, part))
                cursor = part.end
            labeled.append(
                (
                    PartKind.HYBRID,
                    joiner.join(cursor, attach, f"W{len(waypoints)}->attach", True),
                )
            )
    else:
        labeled.append(
            (PartKind.HYBRID, joiner.join(detachment, attach, "detachment->attach", True))
        )

    labeled.append((PartKind.ENTRY, entry_path))
    return _finish(labeled, grid, joiner, t0)


def plain_hybrid_astar(req: PlanRequest, world: World, grid: GridMap) -> PlanResult:
    """Baseline: one unguided Hybrid A* join from detachment to attach pose."""
    t0 = time.perf_counter()
    base = search_params_from_overrides(req.overrides)
    exit_path, detachment, entry_path, attach, _sa, _ga = _prelude(req, world)
    joiner = _Joiner(world, grid, base)
    labeled = [
        (PartKind.EXIT, exit_path),
        (PartKind.HYBRID, joiner.join(detachment, attach, "detachment->attach", True)),
        (PartKind.ENTRY, entry_path),
    ]
    return _finish(labeled, grid, joiner, t0)


_DISPATCH = {
    PlannerKind.HYBRID_ASTAR: plain_hybrid_astar,
    PlannerKind.ROADMAP: roadmap_hybrid_astar,
    PlannerKind.WAYPOINT: waypoint_hybrid_astar,
}


def plan_request(req: PlanRequest, world: World, grid: GridMap) -> PlanResult:
    """Dispatch a request to the planner it names."""
    return _DISPATCH[req.planner](req, world, grid)
