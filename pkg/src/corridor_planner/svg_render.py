"""SVG rendering of worlds, grids, and planned paths for visual debugging.

Styling follows the plant-map conventions: green machine-area borders, pink
corridor borders, red forward roadmap segments, blue reverse ones; planned
paths are colored per part (exit / hybrid / corridor / entry).
"""

from __future__ import annotations

import math
from typing import Optional, Union

from .geometry import Direction, sample_bezier
from .grid_map import GridMap
from .paths import Path
from .planners import PlanResult
from .scenario_io import Sink, _write_bytes
from .world_model import World, ZoneKind

_SCALE = 14.0  # px per meter

_ZONE_COLOR = {ZoneKind.MACHINE_AREA: "#2e8b57", ZoneKind.CORRIDOR: "#e8539a"}
_SEG_COLOR = {Direction.FORWARD: "#d62728", Direction.REVERSE: "#1f77b4"}
_PART_COLOR = {
    "exit": "#ff8c00",
    "hybrid": "#111111",
    "corridor": "#9932cc",
    "entry": "#008b8b",
    "hybrid_astar": "#111111",
    "fixed_segment": "#9932cc",
    "analytic": "#555555",
}


class _Canvas:
    def __init__(self, grid: GridMap):
        x0, y0, x1, y1 = grid.world_bounds
        self.x0 = x0
        self.y1 = y1
        self.width = (x1 - x0) * _SCALE
        self.height = (y1 - y0) * _SCALE
        self.parts: list[str] = []

    def px(self, x: float, y: float) -> tuple[float, float]:
        return ((x - self.x0) * _SCALE, (self.y1 - y) * _SCALE)

    def add(self, element: str) -> None:
        self.parts.append(element)

    def polyline(self, pts, cls: str, color: str, width: float, dash: str = "") -> None:
        coords = " ".join(f"{px:.1f},{py:.1f}" for px, py in (self.px(x, y) for x, y in pts))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.add(
            f'<polyline class="{cls}" points="{coords}" fill="none" '
            f'stroke="{color}" stroke-width="{width}"{dash_attr}/>'
        )

    def render(self) -> bytes:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{self.width:.0f}" height="{self.height:.0f}" '
            f'viewBox="0 0 {self.width:.1f} {self.height:.1f}">'
        )
        body = "\n".join(self.parts)
        return (head + "\n" + body + "\n</svg>\n").encode("utf-8")


def _draw_grid(canvas: _Canvas, grid: GridMap) -> None:
    canvas.add(
        f'<rect class="backdrop" x="0" y="0" width="{canvas.width:.1f}" '
        f'height="{canvas.height:.1f}" fill="#ffffff"/>'
    )
    res = grid.resolution
    occ = grid.occupancy
    for iy in range(grid.height):
        row = occ[iy]
        ix = 0
        while ix < grid.width:
            if not row[ix]:
                ix += 1
                continue
            run = ix
            while run < grid.width and row[run]:
                run += 1
            x, y = grid.origin[0] + ix * res, grid.origin[1] + (iy + 1) * res
            px, py = canvas.px(x, y)
            canvas.add(
                f'<rect class="occ" x="{px:.1f}" y="{py:.1f}" '
                f'width="{(run - ix) * res * _SCALE:.1f}" height="{res * _SCALE:.1f}" '
                f'fill="#3a3a3a"/>'
            )
            ix = run


def _draw_world(canvas: _Canvas, world: World) -> None:
    for zone in world.topo.zones:
        r = zone.rect
        px, py = canvas.px(r.x0, r.y1)
        canvas.add(
            f'<rect class="zone {zone.kind.value}" x="{px:.1f}" y="{py:.1f}" '
            f'width="{(r.x1 - r.x0) * _SCALE:.1f}" height="{(r.y1 - r.y0) * _SCALE:.1f}" '
            f'fill="none" stroke="{_ZONE_COLOR[zone.kind]}" stroke-width="2"/>'
        )
        lx, ly = canvas.px(r.x0 + 0.2, r.y1 - 0.2)
        canvas.add(
            f'<text class="zone-label" x="{lx:.1f}" y="{ly + 10:.1f}" '
            f'font-size="11" fill="{_ZONE_COLOR[zone.kind]}">{zone.id}</text>'
        )

    for seg in world.seg_graph.segments:
        samples = sample_bezier(seg.curve, world.seg_graph.sample_step, seg.direction)
        pts = [(p.x, p.y) for p, _d in samples]
        cls = "seg reverse" if seg.direction is Direction.REVERSE else "seg forward"
        dash = "5,4" if seg.direction is Direction.REVERSE else ""
        canvas.polyline(pts, cls, _SEG_COLOR[seg.direction], 1.6, dash)

    for ep in world.seg_graph.endpoints:
        px, py = canvas.px(ep.pose.x, ep.pose.y)
        canvas.add(
            f'<circle class="endpoint" cx="{px:.1f}" cy="{py:.1f}" r="2.5" fill="#333333"/>'
        )
        canvas.add(
            f'<text class="endpoint-label" x="{px + 3:.1f}" y="{py - 3:.1f}" '
            f'font-size="9" fill="#333333">{ep.id}</text>'
        )

    for node in world.seg_graph.machine_nodes:
        px, py = canvas.px(node.pose.x, node.pose.y)
        dx = 6.0 * math.cos(node.pose.theta)
        dy = -6.0 * math.sin(node.pose.theta)
        canvas.add(
            f'<circle class="machine-node" cx="{px:.1f}" cy="{py:.1f}" r="3.5" '
            f'fill="none" stroke="#000000" stroke-width="1.2"/>'
        )
        canvas.add(
            f'<line class="machine-node-heading" x1="{px:.1f}" y1="{py:.1f}" '
            f'x2="{px + dx:.1f}" y2="{py + dy:.1f}" stroke="#000000" stroke-width="1.2"/>'
        )
        canvas.add(
            f'<text class="machine-node-label" x="{px + 4:.1f}" y="{py + 11:.1f}" '
            f'font-size="10" font-weight="bold" fill="#000000">{node.id}</text>'
        )


def _provenance_parts(path: Path) -> list[tuple[str, int, int]]:
    """Contiguous provenance runs, for rendering bare paths from CSV."""
    runs = []
    start = 0
    for i in range(1, len(path.points) + 1):
        if i == len(path.points) or path.points[i].provenance is not path.points[start].provenance:
            runs.append((path.points[start].provenance.value, start, i))
            start = i
    return runs


def _draw_path(canvas: _Canvas, payload: Union[PlanResult, Path]) -> None:
    if isinstance(payload, PlanResult):
        path = payload.path
        parts = [(part.kind.value, part.start, part.stop) for part in payload.parts]
    else:
        path = payload
        parts = _provenance_parts(payload)
    for kind, start, stop in parts:
        span = path.points[max(0, start - 1) : stop]  # overlap one point per seam
        pts = [(pt.pose.x, pt.pose.y) for pt in span]
        if len(pts) < 2:
            continue
        canvas.polyline(pts, f"part {kind}", _PART_COLOR.get(kind, "#000000"), 2.4)


def render_svg(
    world: World,
    grid: GridMap,
    result: Optional[Union[PlanResult, Path]] = None,
    out: Optional[Sink] = None,
) -> int:
    """Render the world (and optionally a planned path) to SVG; bytes written."""
    canvas = _Canvas(grid)
    _draw_grid(canvas, grid)
    _draw_world(canvas, world)
    if result is not None:
        _draw_path(canvas, result)
    data = canvas.render()
    if out is None:
        return len(data)
    return _write_bytes(out, data)
