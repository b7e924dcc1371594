"""Exception types shared across the package."""


class PlannerError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(PlannerError):
    """An argument violates a documented precondition."""


class ParseError(PlannerError):
    """A world, scenario, or raster file is malformed."""


class DegenerateTangent(PlannerError):
    """A curve has no usable tangent (zero-length or vanishing derivative)."""


class OutsideAllZones(PlannerError):
    """A point is not contained in any declared zone."""


class NoRouteError(PlannerError):
    """The topological graph has no route between the requested zones."""


class RoadmapIncomplete(PlannerError):
    """The segment graph is missing a chain the request needs."""


class UnknownNode(PlannerError):
    """A machine node id does not exist in the world."""


class StartBlocked(PlannerError):
    """The start pose is in collision."""


class GoalBlocked(PlannerError):
    """The goal cell is occupied or outside the map."""


class NoPathFound(PlannerError):
    """Search exhausted its open list or expansion budget."""


class IoError(PlannerError):
    """Writing an output artifact failed."""


class DiscontinuousJoin(PlannerError):
    """Adjacent path parts do not meet within the join tolerance."""

    def __init__(self, index: int, gap: float):
        super().__init__(f"parts {index} and {index + 1} are {gap:.6f} m apart")
        self.index = index
        self.gap = gap


class ValidationFailed(PlannerError):
    """Roadmap validation reported violations; the report rides along."""

    def __init__(self, report):
        super().__init__("roadmap validation failed:\n" + report.format_text())
        self.report = report
