"""Command-line interface: plan, validate, bench, and render subcommands.

Exit codes: 0 success, 2 usage error, 3 parse/validation failure, 4 planning
failure.  CORRIDOR_PLANNER_LOG in {error, info, debug} controls stderr logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path as FsPath

from .bench import run_suite, write_bench_csv
from .errors import (
    InvalidInput,
    IoError,
    NoPathFound,
    NoRouteError,
    OutsideAllZones,
    ParseError,
    RoadmapIncomplete,
    StartBlocked,
    UnknownNode,
    ValidationFailed,
)
from .planners import plan_request
from .scenario_io import load_scenario, load_world_and_grid, write_path_csv
from .svg_render import render_svg
from .world_model import validate_roadmap

_PLANNING_ERRORS = (
    NoPathFound,
    NoRouteError,
    RoadmapIncomplete,
    UnknownNode,
    StartBlocked,
    OutsideAllZones,
)

log = logging.getLogger("corridor_planner.cli")


def _configure_logging() -> None:
    level_name = os.environ.get("CORRIDOR_PLANNER_LOG", "error").lower()
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        level_name, logging.ERROR
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corridor-planner",
        description="Plan AGV routes over zoned grid maps with fixed Bezier roadmaps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="plan every scenario request, writing CSV/SVG/JSON")
    p_plan.add_argument("--world", required=True)
    p_plan.add_argument("--scenario", required=True)
    p_plan.add_argument("--out", required=True, help="output directory")

    p_val = sub.add_parser("validate", help="run roadmap validation and print the report")
    p_val.add_argument("--world", required=True)

    p_bench = sub.add_parser("bench", help="compare all three planners over a scenario")
    p_bench.add_argument("--world", required=True)
    p_bench.add_argument("--scenario", required=True)
    p_bench.add_argument("--out", required=True, help="output CSV file")
    p_bench.add_argument("--repetitions", type=int, default=1)

    p_render = sub.add_parser("render", help="render the world (optionally with a path CSV)")
    p_render.add_argument("--world", required=True)
    p_render.add_argument("--path", default=None, help="path CSV to overlay")
    p_render.add_argument("--out", required=True, help="output SVG file")
    return parser


def _cmd_plan(args) -> int:
    world, grid = load_world_and_grid(args.world)
    scenario = load_scenario(args.scenario, world)
    out_dir = FsPath(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    failures = []
    for i, req in enumerate(scenario.requests):
        stem = f"req{i:02d}_{req.planner.value}"
        try:
            result = plan_request(req, world, grid)
        except _PLANNING_ERRORS as exc:
            failures.append((stem, exc))
            print(f"{stem}: FAILED {type(exc).__name__}: {exc}", file=sys.stderr)
            continue
        write_path_csv(result, out_dir / f"{stem}.csv")
        render_svg(world, grid, result, out_dir / f"{stem}.svg")
        metrics_doc = {
            "request": i,
            "start_node": req.start_node,
            "goal_node": req.goal_node,
            "planner": req.planner.value,
            "length_m": result.metrics.length,
            "direction_switches": result.metrics.direction_switches,
            "max_abs_curvature": result.metrics.max_abs_curvature,
            "min_clearance_m": result.metrics.min_clearance,
            "planning_time_s": result.metrics.planning_time,
            "expansions": result.metrics.expansions,
            "hybrid_joins": result.join_count,
            "parts": [
                {"kind": p.kind.value, "start": p.start, "stop": p.stop}
                for p in result.parts
            ],
        }
        (out_dir / f"{stem}.json").write_text(
            json.dumps(metrics_doc, indent=2) + "\n", encoding="utf-8"
        )
        print(f"{stem}: ok length={result.metrics.length:.3f}m parts={len(result.parts)}")
    if failures:
        print(f"{len(failures)} of {len(scenario.requests)} requests failed", file=sys.stderr)
        return 4
    return 0


def _cmd_validate(args) -> int:
    world, grid = load_world_and_grid(args.world, skip_validation=True)
    report = validate_roadmap(world, grid)
    print(report.format_text())
    return 0 if report.passed else 3


def _cmd_bench(args) -> int:
    world, grid = load_world_and_grid(args.world)
    scenario = load_scenario(args.scenario, world)
    rows = run_suite(world, grid, scenario, repetitions=args.repetitions)
    write_bench_csv(rows, args.out)
    solved = sum(1 for r in rows if r.solved)
    print(f"bench: {solved}/{len(rows)} rows solved -> {args.out}")
    return 0


def _cmd_render(args) -> int:
    from .scenario_io import read_path_csv

    world, grid = load_world_and_grid(args.world)
    payload = read_path_csv(args.path) if args.path else None
    n = render_svg(world, grid, payload, args.out)
    print(f"render: wrote {n} bytes to {args.out}")
    return 0


def cli(argv: list[str]) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "plan":
            return _cmd_plan(args)
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "render":
            return _cmd_render(args)
        return 2
    except ValidationFailed as exc:
        print(f"validation failed:\n{exc.report.format_text()}", file=sys.stderr)
        return 3
    except (ParseError, InvalidInput) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except _PLANNING_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except IoError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
