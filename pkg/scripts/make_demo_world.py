#!/usr/bin/env python3
"""Generate the bundled demo world: a 46x20 m plant with four machine rooms
linked by three corridors, nine dockable machines, and authored roadmap curves.

Writes worlds/demo/{plant.pgm, world.json, scenario.json, scenario_bench.json}
and fails if the authored roadmap does not validate.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from corridor_planner.geometry import BezierCurve, bezier_max_abs_curvature  # noqa: E402
from corridor_planner.grid_map import GridMap, emit_pgm  # noqa: E402
from corridor_planner.scenario_io import load_world_and_grid  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "worlds" / "demo"

RES = 0.2
W_M, H_M = 46.0, 20.0
NX, NY = int(W_M / RES), int(H_M / RES)

# occupied rectangles (world meters): outer ring, inter-room walls with
# corridor openings, machine blocks
WALL_RECTS = [
    (-1, -1, W_M + 1, 1.0),  # bottom
    (-1, 19.0, W_M + 1, H_M + 1),  # top
    (-1, -1, 1.0, H_M + 1),  # left
    (45.0, -1, W_M + 1, H_M + 1),  # right
    # room dividers, leaving the 8..12 m corridor band free
    (9.0, 1.0, 13.0, 8.0),
    (9.0, 12.0, 13.0, 19.0),
    (21.0, 1.0, 25.0, 8.0),
    (21.0, 12.0, 25.0, 19.0),
    (33.0, 1.0, 37.0, 8.0),
    (33.0, 12.0, 37.0, 19.0),
]
MACHINE_RECTS = [
    (1.5, 17.0, 3.5, 19.0),  # m11
    (4.5, 17.0, 6.5, 19.0),  # m12
    (7.0, 17.0, 9.0, 19.0),  # m13
    (16.0, 1.0, 18.0, 3.0),  # m17
    (18.6, 17.0, 20.6, 19.0),  # m19
    (26.0, 17.0, 28.0, 19.0),  # m21
    (30.0, 1.0, 32.0, 3.0),  # m22
    (38.0, 17.0, 40.0, 19.0),  # m23
    (42.0, 17.0, 44.0, 19.0),  # m24
]

SOUTH = -math.pi / 2
NORTH = math.pi / 2


def build_raster() -> np.ndarray:
    occ = np.zeros((NY, NX), dtype=bool)
    cx = (np.arange(NX) + 0.5) * RES
    cy = (np.arange(NY) + 0.5) * RES
    xs, ys = np.meshgrid(cx, cy)
    for x0, y0, x1, y1 in WALL_RECTS + MACHINE_RECTS:
        occ |= (xs >= x0) & (xs <= x1) & (ys >= y0) & (ys <= y1)
    return occ


def straight(p0, p1):
    return [list(p0), list(p1)]


def seg(cps, direction, start_ep, end_ep, role, zone):
    return {
        "control_points": cps,
        "direction": direction,
        "start_ep": start_ep,
        "end_ep": end_ep,
        "role": role,
        "zone": zone,
    }


def dock_machine(
    segments: list,
    endpoints: list,
    zone: str,
    dock_ep: int,
    outer_ep: int,
    x: float,
    dock_y: float,
    outer_y: float,
    heading: float,
) -> tuple[list[int], list[int]]:
    """Simple machine: straight forward exit and straight reverse entry."""
    endpoints.append({"id": dock_ep, "pose": [x, dock_y, heading]})
    endpoints.append({"id": outer_ep, "pose": [x, outer_y, heading]})
    i_exit = len(segments)
    segments.append(
        seg(straight((x, dock_y), (x, outer_y)), "forward", dock_ep, outer_ep, "machine_exit", zone)
    )
    i_entry = len(segments)
    segments.append(
        seg(straight((x, outer_y), (x, dock_y)), "reverse", outer_ep, dock_ep, "machine_entry", zone)
    )
    return [i_exit], [i_entry]


def build_world() -> dict:
    zones = [
        {"id": "A", "kind": "machine_area", "rect": [1.0, 1.0, 9.0, 19.0]},
        {"id": "C1", "kind": "corridor", "rect": [9.0, 8.0, 13.0, 12.0]},
        {"id": "B", "kind": "machine_area", "rect": [13.0, 1.0, 21.0, 19.0]},
        {"id": "C2", "kind": "corridor", "rect": [21.0, 8.0, 25.0, 12.0]},
        {"id": "D", "kind": "machine_area", "rect": [25.0, 1.0, 33.0, 19.0]},
        {"id": "C3", "kind": "corridor", "rect": [33.0, 8.0, 37.0, 12.0]},
        {"id": "E", "kind": "machine_area", "rect": [37.0, 1.0, 45.0, 19.0]},
    ]
    topo_edges = [
        {"a": "A", "b": "C1", "connection": [[9.0, 8.0], [9.0, 12.0]]},
        {"a": "C1", "b": "B", "connection": [[13.0, 8.0], [13.0, 12.0]]},
        {"a": "B", "b": "C2", "connection": [[21.0, 8.0], [21.0, 12.0]]},
        {"a": "C2", "b": "D", "connection": [[25.0, 8.0], [25.0, 12.0]]},
        {"a": "D", "b": "C3", "connection": [[33.0, 8.0], [33.0, 12.0]]},
        {"a": "C3", "b": "E", "connection": [[37.0, 8.0], [37.0, 12.0]]},
    ]

    endpoints: list[dict] = [
        {"id": 1, "pose": [9.0, 10.0, 0.0]},
        {"id": 2, "pose": [13.0, 10.0, 0.0]},
        {"id": 3, "pose": [21.0, 10.0, 0.0]},
        {"id": 4, "pose": [23.0, 10.0, 0.0]},
        {"id": 5, "pose": [25.0, 10.0, 0.0]},
        {"id": 6, "pose": [33.0, 10.0, 0.0]},
        {"id": 7, "pose": [37.0, 10.0, 0.0]},
    ]
    segments: list[dict] = [
        seg(
            [[9.0, 10.0], [10.33, 10.0], [11.67, 10.0], [13.0, 10.0]],
            "forward", 1, 2, "corridor", "C1",
        ),
        seg(
            [[21.0, 10.0], [21.67, 10.0], [22.33, 10.0], [23.0, 10.0]],
            "forward", 3, 4, "corridor", "C2",
        ),
        seg(
            [[23.0, 10.0], [23.67, 10.0], [24.33, 10.0], [25.0, 10.0]],
            "forward", 4, 5, "corridor", "C2",
        ),
        seg(
            [[33.0, 10.0], [34.33, 10.0], [35.67, 10.0], [37.0, 10.0]],
            "forward", 6, 7, "corridor", "C3",
        ),
    ]
    machine_nodes: list[dict] = []

    # --- machine 11: two-segment curved exit, straight reverse entry --------
    exit2 = [[2.5, 14.4], [2.5, 13.2], [3.1, 12.78], [4.3, 12.6]]
    detach_heading = math.atan2(12.6 - 12.78, 4.3 - 3.1)
    endpoints += [
        {"id": 30, "pose": [2.5, 15.9, SOUTH]},
        {"id": 31, "pose": [2.5, 14.4, SOUTH]},
        {"id": 32, "pose": [4.3, 12.6, detach_heading]},
        {"id": 33, "pose": [2.5, 12.9, SOUTH]},
    ]
    segments += [
        seg(straight((2.5, 15.9), (2.5, 14.4)), "forward", 30, 31, "machine_exit", "A"),
        seg(exit2, "forward", 31, 32, "machine_exit", "A"),
        seg(straight((2.5, 12.9), (2.5, 15.9)), "reverse", 33, 30, "machine_entry", "A"),
    ]
    machine_nodes.append(
        {"id": 11, "pose": [2.5, 15.9, SOUTH], "exit_chain": [4, 5], "entry_chain": [6]}
    )

    # --- machines 12, 13: straight in/out ------------------------------------
    for node_id, x, dock_ep, outer_ep in ((12, 5.5, 34, 35), (13, 8.0, 36, 37)):
        exit_chain, entry_chain = dock_machine(
            segments, endpoints, "A", dock_ep, outer_ep, x, 15.9, 12.9, SOUTH
        )
        machine_nodes.append(
            {"id": node_id, "pose": [x, 15.9, SOUTH], "exit_chain": exit_chain,
             "entry_chain": entry_chain}
        )

    # --- machine 17: forward approach curve, cusp, reverse dock-in ----------
    approach = [[14.5, 5.6], [15.9, 5.6], [17.0, 6.0], [17.0, 7.1]]
    endpoints += [
        {"id": 38, "pose": [17.0, 4.1, NORTH]},
        {"id": 39, "pose": [17.0, 7.1, NORTH]},
        {"id": 40, "pose": [14.5, 5.6, 0.0]},
    ]
    i0 = len(segments)
    segments += [
        seg(straight((17.0, 4.1), (17.0, 7.1)), "forward", 38, 39, "machine_exit", "B"),
        seg(approach, "forward", 40, 39, "machine_entry", "B"),
        seg(straight((17.0, 7.1), (17.0, 4.1)), "reverse", 39, 38, "machine_entry", "B"),
    ]
    machine_nodes.append(
        {"id": 17, "pose": [17.0, 4.1, NORTH], "exit_chain": [i0],
         "entry_chain": [i0 + 1, i0 + 2]}
    )

    # --- machine 19 (room B, top) --------------------------------------------
    exit_chain, entry_chain = dock_machine(
        segments, endpoints, "B", 41, 42, 19.6, 15.9, 12.9, SOUTH
    )
    machine_nodes.append(
        {"id": 19, "pose": [19.6, 15.9, SOUTH], "exit_chain": exit_chain,
         "entry_chain": entry_chain}
    )

    # --- room D ---------------------------------------------------------------
    exit_chain, entry_chain = dock_machine(
        segments, endpoints, "D", 43, 44, 27.0, 15.9, 12.9, SOUTH
    )
    machine_nodes.append(
        {"id": 21, "pose": [27.0, 15.9, SOUTH], "exit_chain": exit_chain,
         "entry_chain": entry_chain}
    )
    exit_chain, entry_chain = dock_machine(
        segments, endpoints, "D", 45, 46, 31.0, 4.1, 7.1, NORTH
    )
    machine_nodes.append(
        {"id": 22, "pose": [31.0, 4.1, NORTH], "exit_chain": exit_chain,
         "entry_chain": entry_chain}
    )

    # --- room E ---------------------------------------------------------------
    for node_id, x, dock_ep, outer_ep in ((23, 39.0, 47, 48), (24, 43.0, 49, 50)):
        exit_chain, entry_chain = dock_machine(
            segments, endpoints, "E", dock_ep, outer_ep, x, 15.9, 12.9, SOUTH
        )
        machine_nodes.append(
            {"id": node_id, "pose": [x, 15.9, SOUTH], "exit_chain": exit_chain,
             "entry_chain": entry_chain}
        )

    return {
        "grid": {"pgm": "plant.pgm", "resolution": RES, "origin": [0.0, 0.0],
                 "occupied_threshold": 128},
        "vehicle": {"length": 1.2, "width": 0.8, "ref_offset": 0.0, "min_turn_radius": 1.0},
        "zones": zones,
        "topo_edges": topo_edges,
        "endpoints": endpoints,
        "segments": segments,
        "machine_nodes": machine_nodes,
    }


REQUESTS = [
    # same-area pairs (rooms A, B, D, E)
    (11, 12, "roadmap"), (12, 11, "waypoint"), (11, 13, "roadmap"),
    (13, 11, "waypoint"), (12, 13, "roadmap"), (13, 12, "waypoint"),
    (17, 19, "roadmap"), (19, 17, "waypoint"),
    (21, 22, "roadmap"), (22, 21, "waypoint"),
    (23, 24, "roadmap"), (24, 23, "waypoint"),
    # one corridor crossed
    (13, 19, "roadmap"), (19, 13, "waypoint"), (11, 17, "roadmap"),
    (17, 12, "waypoint"), (12, 19, "hybrid_astar"), (19, 11, "roadmap"),
    (17, 21, "waypoint"), (21, 19, "roadmap"), (19, 22, "waypoint"),
    (21, 23, "roadmap"), (24, 22, "waypoint"), (22, 24, "roadmap"),
    # two corridors
    (11, 21, "waypoint"), (13, 22, "roadmap"), (21, 13, "waypoint"),
    (22, 12, "roadmap"), (17, 23, "waypoint"), (24, 19, "roadmap"),
    # three corridors
    (11, 23, "roadmap"), (13, 24, "waypoint"), (23, 13, "roadmap"),
    (24, 11, "waypoint"),
]

BENCH_REQUESTS = [
    (11, 21, "roadmap"), (13, 22, "roadmap"), (17, 23, "roadmap"),
    (24, 12, "roadmap"), (11, 23, "roadmap"), (13, 24, "roadmap"),
]


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    occ = build_raster()
    grid = GridMap(NX, NY, RES, (0.0, 0.0), occ)
    (OUT / "plant.pgm").write_bytes(emit_pgm(grid))

    world_doc = build_world()
    (OUT / "world.json").write_text(json.dumps(world_doc, indent=2) + "\n")

    for name, reqs in (("scenario.json", REQUESTS), ("scenario_bench.json", BENCH_REQUESTS)):
        doc = {
            "seed": 7,
            "requests": [
                {"start_node": s, "goal_node": g, "planner": p} for s, g, p in reqs
            ],
        }
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")

    # authored curves must respect the vehicle's turning limit with headroom
    for i, s in enumerate(world_doc["segments"]):
        curve = BezierCurve(tuple(tuple(cp) for cp in s["control_points"]))
        kappa = bezier_max_abs_curvature(curve)
        print(f"segment {i:2d} [{s['zone']}:{s['role']}] max|kappa| = {kappa:.4f}")
        assert kappa <= 0.95, f"segment {i} too tight: {kappa:.3f}"

    world, grid = load_world_and_grid(OUT / "world.json")
    print(f"demo world OK: {len(world.zones)} zones, "
          f"{len(world.seg_graph.segments)} segments, "
          f"{len(world.seg_graph.machine_nodes)} machine nodes, "
          f"{len(REQUESTS)} scenario requests")


if __name__ == "__main__":
    main()
