"""World/scenario file formats and the path CSV format.

World files are JSON documents referencing a PGM raster; see the bundled demo
world for a complete example.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Optional, Union

from .errors import InvalidInput, IoError, ParseError, ValidationFailed
from .geometry import BezierCurve, Direction, Pose, VehicleParams
from .grid_map import GridMap, load_grid
from .paths import Path, PathPoint, Provenance
from .planners import PlanRequest, PlannerKind, PlanResult
from .world_model import (
    BezierSegment,
    GridMeta,
    MachineNode,
    Rect,
    RectZone,
    SegmentEndpoint,
    SegmentGraph,
    SegmentRole,
    TopoEdge,
    TopologicalGraph,
    World,
    ZoneKind,
    find_entry_path,
    find_exit_path,
    validate_roadmap,
)

Sink = Union[str, os.PathLike, io.IOBase]


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ParseError(f"{where}: missing field {key!r}")
    return mapping[key]


def _as_point(value, where: str) -> tuple[float, float]:
    try:
        x, y = value
        return float(x), float(y)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected [x, y], got {value!r}") from None


def _as_pose(value, where: str) -> Pose:
    try:
        x, y, theta = value
        return Pose(float(x), float(y), float(theta))
    except (TypeError, ValueError, InvalidInput):
        raise ParseError(f"{where}: expected [x, y, theta], got {value!r}") from None


def _parse_world_dict(doc: dict) -> World:
    grid_doc = _require(doc, "grid", "world")
    meta = GridMeta(
        pgm_path=str(_require(grid_doc, "pgm", "grid")),
        resolution=float(_require(grid_doc, "resolution", "grid")),
        origin=_as_point(_require(grid_doc, "origin", "grid"), "grid.origin"),
        occupied_threshold=int(_require(grid_doc, "occupied_threshold", "grid")),
    )
    if meta.resolution <= 0:
        raise ParseError("grid.resolution must be positive")
    if not (0 <= meta.occupied_threshold <= 255):
        raise ParseError("grid.occupied_threshold must be in 0..255")

    veh_doc = _require(doc, "vehicle", "world")
    try:
        vehicle = VehicleParams(
            length=float(_require(veh_doc, "length", "vehicle")),
            width=float(_require(veh_doc, "width", "vehicle")),
            ref_offset=float(veh_doc.get("ref_offset", 0.0)),
            min_turn_radius=float(_require(veh_doc, "min_turn_radius", "vehicle")),
        )
    except InvalidInput as exc:
        raise ParseError(f"vehicle: {exc}") from exc

    zones = []
    for i, z in enumerate(_require(doc, "zones", "world")):
        where = f"zones[{i}]"
        try:
            kind = ZoneKind(_require(z, "kind", where))
        except ValueError:
            raise ParseError(f"{where}: unknown kind {z.get('kind')!r}") from None
        rect_vals = _require(z, "rect", where)
        try:
            rect = Rect(*(float(v) for v in rect_vals))
        except (TypeError, ValueError):
            raise ParseError(f"{where}: rect must be [x0, y0, x1, y1]") from None
        except InvalidInput as exc:
            raise ParseError(f"{where}: {exc}") from exc
        zones.append(RectZone(id=str(_require(z, "id", where)), kind=kind, rect=rect))

    zone_by_id = {z.id: z for z in zones}
    edges = []
    for i, e in enumerate(_require(doc, "topo_edges", "world")):
        where = f"topo_edges[{i}]"
        a = str(_require(e, "a", where))
        b = str(_require(e, "b", where))
        conn = _require(e, "connection", where)
        try:
            connection = (_as_point(conn[0], where), _as_point(conn[1], where))
        except (IndexError, TypeError):
            raise ParseError(f"{where}: connection must be [[x,y],[x,y]]") from None
        if "weight" in e and e["weight"] is not None:
            weight = float(e["weight"])
        else:
            if a not in zone_by_id or b not in zone_by_id:
                raise ParseError(f"{where}: references unknown zone {a!r} or {b!r}")
            ca = zone_by_id[a].rect.center
            cb = zone_by_id[b].rect.center
            weight = math.dist(ca, cb)
        try:
            edges.append(TopoEdge(a=a, b=b, weight=weight, connection=connection))
        except InvalidInput as exc:
            raise ParseError(f"{where}: {exc}") from exc

    endpoints = []
    for i, ep in enumerate(_require(doc, "endpoints", "world")):
        where = f"endpoints[{i}]"
        endpoints.append(
            SegmentEndpoint(
                id=int(_require(ep, "id", where)),
                pose=_as_pose(_require(ep, "pose", where), where),
            )
        )

    segments = []
    for i, s in enumerate(_require(doc, "segments", "world")):
        where = f"segments[{i}]"
        cps = _require(s, "control_points", where)
        try:
            curve = BezierCurve(tuple(_as_point(cp, where) for cp in cps))
        except InvalidInput as exc:
            raise ParseError(f"{where}: {exc}") from exc
        direction_text = _require(s, "direction", where)
        if direction_text not in ("forward", "reverse"):
            raise ParseError(f"{where}: direction must be forward or reverse")
        try:
            role = SegmentRole(_require(s, "role", where))
        except ValueError:
            raise ParseError(f"{where}: unknown role {s.get('role')!r}") from None
        zone = str(_require(s, "zone", where))
        if zone not in zone_by_id:
            raise ParseError(f"{where}: unknown zone {zone!r}")
        segments.append(
            BezierSegment(
                curve=curve,
                direction=Direction.FORWARD if direction_text == "forward" else Direction.REVERSE,
                start_ep=int(_require(s, "start_ep", where)),
                end_ep=int(_require(s, "end_ep", where)),
                role=role,
                zone=zone,
            )
        )

    nodes = []
    for i, n in enumerate(_require(doc, "machine_nodes", "world")):
        where = f"machine_nodes[{i}]"
        nodes.append(
            MachineNode(
                id=int(_require(n, "id", where)),
                pose=_as_pose(_require(n, "pose", where), where),
                exit_chain=tuple(int(v) for v in _require(n, "exit_chain", where)),
                entry_chain=tuple(int(v) for v in _require(n, "entry_chain", where)),
            )
        )

    try:
        topo = TopologicalGraph(zones=tuple(zones), edges=tuple(edges))
        seg_graph = SegmentGraph(
            endpoints=tuple(endpoints),
            segments=tuple(segments),
            machine_nodes=tuple(nodes),
            sample_step=meta.resolution / 2.0,
        )
    except InvalidInput as exc:
        raise ParseError(str(exc)) from exc

    world = World(topo=topo, seg_graph=seg_graph, vehicle=vehicle, grid_meta=meta)
    # every machine chain must actually connect to its node pose
    for node in seg_graph.machine_nodes:
        find_exit_path(node.id, seg_graph)
        find_entry_path(node.id, seg_graph)
    return world


def load_grid_for(world: World, world_path: Union[str, os.PathLike]) -> GridMap:
    """Load the PGM raster referenced by a world file (path-relative)."""
    pgm = FsPath(world_path).parent / world.grid_meta.pgm_path
    try:
        data = pgm.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read PGM raster {pgm}: {exc}") from exc
    return load_grid(
        data,
        world.grid_meta.resolution,
        world.grid_meta.origin,
        world.grid_meta.occupied_threshold,
    )


def load_world_and_grid(
    path: Union[str, os.PathLike], skip_validation: bool = False
) -> tuple[World, GridMap]:
    """Parse, cross-reference, and (unless skipped) roadmap-validate a world file."""
    p = FsPath(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read world file {p}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}:{exc.lineno}: {exc.msg}") from exc
    world = _parse_world_dict(doc)
    grid = load_grid_for(world, p)
    if not skip_validation:
        report = validate_roadmap(world, grid)
        if not report.passed:
            raise ValidationFailed(report)
    return world, grid


def load_world(path: Union[str, os.PathLike], skip_validation: bool = False) -> World:
    world, _grid = load_world_and_grid(path, skip_validation=skip_validation)
    return world


def emit_world(world: World) -> str:
    """Serialize a World back to canonical world-file JSON (stable field order)."""
    doc = {
        "grid": {
            "pgm": world.grid_meta.pgm_path,
            "resolution": world.grid_meta.resolution,
            "origin": list(world.grid_meta.origin),
            "occupied_threshold": world.grid_meta.occupied_threshold,
        },
        "vehicle": {
            "length": world.vehicle.length,
            "width": world.vehicle.width,
            "ref_offset": world.vehicle.ref_offset,
            "min_turn_radius": world.vehicle.min_turn_radius,
        },
        "zones": [
            {"id": z.id, "kind": z.kind.value, "rect": [z.rect.x0, z.rect.y0, z.rect.x1, z.rect.y1]}
            for z in world.topo.zones
        ],
        "topo_edges": [
            {
                "a": e.a,
                "b": e.b,
                "weight": e.weight,
                "connection": [list(e.connection[0]), list(e.connection[1])],
            }
            for e in world.topo.edges
        ],
        "endpoints": [
            {"id": ep.id, "pose": [ep.pose.x, ep.pose.y, ep.pose.theta]}
            for ep in world.seg_graph.endpoints
        ],
        "segments": [
            {
                "control_points": [list(cp) for cp in s.curve.control_points],
                "direction": "forward" if s.direction is Direction.FORWARD else "reverse",
                "start_ep": s.start_ep,
                "end_ep": s.end_ep,
                "role": s.role.value,
                "zone": s.zone,
            }
            for s in world.seg_graph.segments
        ],
        "machine_nodes": [
            {
                "id": n.id,
                "pose": [n.pose.x, n.pose.y, n.pose.theta],
                "exit_chain": list(n.exit_chain),
                "entry_chain": list(n.entry_chain),
            }
            for n in world.seg_graph.machine_nodes
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


# scenarios --------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    seed: int
    requests: tuple[PlanRequest, ...]


def load_scenario(path: Union[str, os.PathLike], world: Optional[World] = None) -> Scenario:
    """Parse a scenario file; with a world given, check that node ids resolve."""
    p = FsPath(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read scenario file {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}:{exc.lineno}: {exc.msg}") from exc

    requests = []
    for i, r in enumerate(doc.get("requests", [])):
        where = f"requests[{i}]"
        planner_text = r.get("planner", "roadmap")
        try:
            planner = PlannerKind(planner_text)
        except ValueError:
            raise ParseError(f"{where}: unknown planner {planner_text!r}") from None
        req = PlanRequest(
            start_node=int(_require(r, "start_node", where)),
            goal_node=int(_require(r, "goal_node", where)),
            planner=planner,
            overrides=r.get("overrides"),
        )
        if world is not None:
            for node_id in (req.start_node, req.goal_node):
                if world.seg_graph.node(node_id) is None:
                    raise ParseError(f"{where}: unknown machine node {node_id}")
        requests.append(req)
    return Scenario(seed=int(doc.get("seed", 0)), requests=tuple(requests))


# path CSV ---------------------------------------------------------------------

_CSV_HEADER = "x,y,theta,direction,provenance"


def _write_bytes(sink: Sink, data: bytes) -> int:
    try:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, "wb") as fh:
                fh.write(data)
        else:
            payload: Union[bytes, str] = data
            if isinstance(sink, io.TextIOBase):
                payload = data.decode("utf-8")
            sink.write(payload)
    except OSError as exc:
        raise IoError(f"failed writing output: {exc}") from exc
    return len(data)


def write_path_csv(result: Union[PlanResult, Path], sink: Sink) -> int:
    """Write one row per pose (6 decimals); returns the bytes written."""
    path = result.path if isinstance(result, PlanResult) else result
    lines = [_CSV_HEADER]
    for pt in path.points:
        lines.append(
            f"{pt.pose.x:.6f},{pt.pose.y:.6f},{pt.pose.theta:.6f},"
            f"{pt.direction.value},{pt.provenance.value}"
        )
    return _write_bytes(sink, ("\n".join(lines) + "\n").encode("utf-8"))


def read_path_csv(source: Union[str, os.PathLike, io.IOBase]) -> Path:
    """Parse a path CSV produced by write_path_csv."""
    if isinstance(source, (str, os.PathLike)):
        try:
            text = FsPath(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read path CSV {source}: {exc}") from exc
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != _CSV_HEADER:
        raise ParseError("path CSV must start with the header " + _CSV_HEADER)
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 5:
            raise ParseError(f"path CSV line {lineno}: expected 5 fields")
        x, y, theta, d, prov = fields
        try:
            direction = Direction(d)
            provenance = Provenance(prov)
            points.append(
                PathPoint(Pose(float(x), float(y), float(theta)), direction, provenance)
            )
        except (ValueError, InvalidInput) as exc:
            raise ParseError(f"path CSV line {lineno}: {exc}") from exc
    if not points:
        raise ParseError("path CSV contains no poses")
    return Path(tuple(points))
