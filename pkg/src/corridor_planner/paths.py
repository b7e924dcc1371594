"""Path containers shared by the search and roadmap layers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .errors import InvalidInput
from .geometry import Direction, Pose


class Provenance(Enum):
    """Which mechanism produced a path point."""

    HYBRID_ASTAR = "hybrid_astar"
    FIXED_SEGMENT = "fixed_segment"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class PathPoint:
    pose: Pose
    direction: Direction
    provenance: Provenance


@dataclass(frozen=True)
class Path:
    """Ordered poses with per-point travel direction and provenance."""

    points: tuple[PathPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise InvalidInput("a path needs at least one point")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[PathPoint]:
        return iter(self.points)

    @property
    def start(self) -> Pose:
        return self.points[0].pose

    @property
    def end(self) -> Pose:
        return self.points[-1].pose

    def length(self) -> float:
        pts = self.points
        return sum(
            math.hypot(b.pose.x - a.pose.x, b.pose.y - a.pose.y)
            for a, b in zip(pts, pts[1:])
        )

    def direction_switches(self) -> int:
        pts = self.points
        return sum(1 for a, b in zip(pts, pts[1:]) if a.direction is not b.direction)

    @staticmethod
    def from_samples(
        samples: Iterable[tuple[Pose, Direction]], provenance: Provenance
    ) -> "Path":
        return Path(tuple(PathPoint(pose, d, provenance) for pose, d in samples))
