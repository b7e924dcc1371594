"""Comparative benchmark: plain Hybrid A* vs roadmap vs waypoint planners."""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass
from typing import Optional

from .errors import PlannerError
from .grid_map import GridMap
from .planners import (
    PlannerKind,
    PlanResult,
    plain_hybrid_astar,
    roadmap_hybrid_astar,
    waypoint_hybrid_astar,
)
from .scenario_io import Scenario, Sink, _write_bytes
from .world_model import World

log = logging.getLogger("corridor_planner.bench")

_PLANNER_ORDER = (
    (PlannerKind.HYBRID_ASTAR, plain_hybrid_astar),
    (PlannerKind.ROADMAP, roadmap_hybrid_astar),
    (PlannerKind.WAYPOINT, waypoint_hybrid_astar),
)


@dataclass(frozen=True)
class BenchRow:
    request_id: str
    planner: str
    solved: bool
    length: Optional[float]
    planning_time: Optional[float]
    expansions: Optional[int]
    direction_switches: Optional[int]
    max_abs_curvature: Optional[float]
    min_clearance: Optional[float]


def run_suite(
    world: World, grid: GridMap, scenario: Scenario, repetitions: int = 1
) -> list[BenchRow]:
    """Every request under all three planners; the plain baseline plans the same
    detachment-to-attach problem the composite planners solve between their
    fixed parts.  planning_time is the median over repetitions."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    rows: list[BenchRow] = []
    for i, req in enumerate(scenario.requests):
        rid = f"r{i:02d}"
        for kind, runner in _PLANNER_ORDER:
            times: list[float] = []
            result: Optional[PlanResult] = None
            failure: Optional[PlannerError] = None
            for _rep in range(repetitions):
                try:
                    result = runner(req, world, grid)
                except PlannerError as exc:
                    failure = exc
                    break
                times.append(result.metrics.planning_time)
            if failure is not None or result is None:
                log.info("%s %s unsolved: %s", rid, kind.value, failure)
                rows.append(
                    BenchRow(rid, kind.value, False, None, None, None, None, None, None)
                )
                continue
            m = result.metrics
            rows.append(
                BenchRow(
                    request_id=rid,
                    planner=kind.value,
                    solved=True,
                    length=m.length,
                    planning_time=statistics.median(times),
                    expansions=m.expansions,
                    direction_switches=m.direction_switches,
                    max_abs_curvature=m.max_abs_curvature,
                    min_clearance=m.min_clearance,
                )
            )
    return rows


_COLUMNS = (
    "request",
    "planner",
    "solved",
    "length_m",
    "planning_time_s",
    "expansions",
    "direction_switches",
    "max_abs_curvature",
    "min_clearance_m",
)


def _fmt(value, spec: str) -> str:
    return "" if value is None else format(value, spec)


def _row_line(row: BenchRow) -> str:
    return ",".join(
        (
            row.request_id,
            row.planner,
            "true" if row.solved else "false",
            _fmt(row.length, ".6f"),
            _fmt(row.planning_time, ".6f"),
            _fmt(row.expansions, "d"),
            _fmt(row.direction_switches, "d"),
            _fmt(row.max_abs_curvature, ".6f"),
            _fmt(row.min_clearance, ".6f"),
        )
    )


def write_bench_csv(rows: list[BenchRow], sink: Sink) -> int:
    """Rows in stable column order plus one median summary line per planner."""
    lines = [",".join(_COLUMNS)]
    lines.extend(_row_line(r) for r in rows)

    planners_seen: list[str] = []
    for row in rows:
        if row.planner not in planners_seen:
            planners_seen.append(row.planner)
    for planner in planners_seen:
        solved = [r for r in rows if r.planner == planner and r.solved]
        if not solved:
            lines.append(f"median,{planner},false,,,,,,")
            continue
        med = lambda vals: statistics.median(vals)  # noqa: E731
        lines.append(
            ",".join(
                (
                    "median",
                    planner,
                    "true",
                    format(med([r.length for r in solved]), ".6f"),
                    format(med([r.planning_time for r in solved]), ".6f"),
                    format(med([r.expansions for r in solved]), "g"),
                    format(med([r.direction_switches for r in solved]), "g"),
                    format(med([r.max_abs_curvature for r in solved]), ".6f"),
                    format(med([r.min_clearance for r in solved]), ".6f"),
                )
            )
        )
    return _write_bytes(sink, ("\n".join(lines) + "\n").encode("utf-8"))
