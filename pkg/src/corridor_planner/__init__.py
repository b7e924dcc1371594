"""Path planning for non-holonomic AGVs in zoned industrial grid maps.

Combines standard Hybrid A* with fixed Bezier roadmaps: the roadmap planner
drives corridors and machine entry/exit maneuvers on authored curves and
bridges them with Hybrid A*; the waypoint planner guides Hybrid A* through
zone-border waypoints instead.
"""

from .errors import (
    DegenerateTangent,
    DiscontinuousJoin,
    GoalBlocked,
    InvalidInput,
    IoError,
    NoPathFound,
    NoRouteError,
    OutsideAllZones,
    ParseError,
    PlannerError,
    RoadmapIncomplete,
    StartBlocked,
    UnknownNode,
    ValidationFailed,
)
from .geometry import (
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
from .grid_map import (
    CostField,
    DistanceField,
    GridMap,
    distance_field,
    emit_pgm,
    footprint_collides,
    holonomic_cost_field,
    load_grid,
    path_collides,
)
from .hybrid_astar import SearchParams, analytic_expansion, expand, plan, plan_with_stats
from .paths import Path, PathPoint, Provenance
from .planners import (
    Metrics,
    PartKind,
    PathPart,
    PlannerKind,
    PlanRequest,
    PlanResult,
    concat_paths,
    path_metrics,
    plain_hybrid_astar,
    plan_request,
    roadmap_hybrid_astar,
    waypoint_hybrid_astar,
)
from .reeds_shepp import reeds_shepp_length
from .scenario_io import (
    Scenario,
    emit_world,
    load_scenario,
    load_world,
    load_world_and_grid,
    read_path_csv,
    write_path_csv,
)
from .svg_render import render_svg
from .world_model import (
    BezierSegment,
    MachineNode,
    Rect,
    RectZone,
    SegmentEndpoint,
    SegmentGraph,
    SegmentRole,
    TopoEdge,
    TopologicalGraph,
    ValidationReport,
    Violation,
    World,
    ZoneKind,
    area_sequence,
    corridors_path,
    corridors_sequence,
    find_entry_path,
    find_exit_path,
    locate_area,
    validate_roadmap,
    waypoints_sequence,
)

__version__ = "0.1.0"
