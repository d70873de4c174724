"""Path estimation and motion along planned paths.

The default planner returns the straight segment between two points: the
arena is obstacle-free, so the straight line is both the estimate and the
executed path, and it keeps replay deterministic.  Anything that satisfies
the ``PathPlanner`` callable signature can be substituted (for example an
obstacle-aware grid planner) without touching the bidding code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .world import Point

PathPlanner = Callable[[Point, Point], "PathEstimate"]


@dataclass(frozen=True)
class PathEstimate:
    """A planned path: ordered waypoints plus its total length."""

    waypoints: tuple[Point, ...]
    length: float

    @property
    def start(self) -> Point:
        return self.waypoints[0]

    @property
    def goal(self) -> Point:
        return self.waypoints[-1]


def make_path(waypoints: Sequence[Point]) -> PathEstimate:
    """Build a PathEstimate whose length is the sum of its segment lengths."""
    if not waypoints:
        raise ValueError("a path needs at least one waypoint")
    pts = tuple(waypoints)
    length = sum(pts[i].distance_to(pts[i + 1]) for i in range(len(pts) - 1))
    return PathEstimate(waypoints=pts, length=length)


def estimate_path(start: Point, goal: Point) -> PathEstimate:
    """Straight-segment estimate between two in-arena points."""
    return make_path((start, goal))


def straight_line_planner(arena_side: float) -> PathPlanner:
    """Default planner: validates arena bounds, returns the straight segment."""

    def plan(start: Point, goal: Point) -> PathEstimate:
        for p in (start, goal):
            if not (0.0 <= p.x <= arena_side and 0.0 <= p.y <= arena_side):
                raise ValueError(f"point {p} outside arena of side {arena_side}")
        return estimate_path(start, goal)

    return plan


def point_along(path: PathEstimate, distance: float) -> Point:
    """The point at arc length `distance` from the start of the path."""
    if distance <= 0.0:
        return path.start
    remaining = distance
    for i in range(len(path.waypoints) - 1):
        a, b = path.waypoints[i], path.waypoints[i + 1]
        seg = a.distance_to(b)
        if remaining <= seg:
            if seg == 0.0:
                continue
            t = remaining / seg
            return Point(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
        remaining -= seg
    return path.goal


def _locate_on_path(path: PathEstimate, pose: Point, tol: float = 1e-6) -> float:
    """Arc length from the path start to `pose`, which must lie on the path."""
    traveled = 0.0
    for i in range(len(path.waypoints) - 1):
        a, b = path.waypoints[i], path.waypoints[i + 1]
        seg = a.distance_to(b)
        if seg == 0.0:
            continue
        # pose is on segment a-b iff |a-pose| + |pose-b| == |a-b|
        d = a.distance_to(pose) + pose.distance_to(b) - seg
        if d <= tol:
            return traveled + a.distance_to(pose)
        traveled += seg
    if pose.distance_to(path.goal) <= tol:
        return path.length
    raise ValueError(f"pose {pose} does not lie on the path")


def advance_along_path(pose: Point, path: PathEstimate,
                       speed: float) -> tuple[Point, float]:
    """Move `pose` exactly min(speed, remaining) further along the path.

    Returns the new pose and the distance actually moved (the caller adds
    that to the robot's odometry).
    """
    at = _locate_on_path(path, pose)
    moved = min(speed, path.length - at)
    return point_along(path, at + moved), moved


@dataclass
class PathCursor:
    """Stateful walker along a path; one `step` per tick.

    Tracks its own arc-length position so repeated float relocation never
    drifts, and reports the segments swept during the step (the scout's
    scanner runs over those, not just the endpoint).
    """

    path: PathEstimate
    traveled: float = 0.0

    @property
    def pose(self) -> Point:
        return point_along(self.path, self.traveled)

    @property
    def arrived(self) -> bool:
        return self.traveled >= self.path.length

    def step(self, speed: float) -> tuple[Point, float, list[tuple[Point, Point]]]:
        """Advance by up to `speed`; returns (pose, moved, swept segments)."""
        start = self.traveled
        moved = min(speed, self.path.length - start)
        end = start + moved
        swept: list[tuple[Point, Point]] = []
        if moved > 0.0:
            a = point_along(self.path, start)
            # walk waypoint boundaries strictly between start and end
            acc = 0.0
            for i in range(len(self.path.waypoints) - 1):
                seg = self.path.waypoints[i].distance_to(self.path.waypoints[i + 1])
                boundary = acc + seg
                acc = boundary
                if start < boundary < end:
                    b = self.path.waypoints[i + 1]
                    swept.append((a, b))
                    a = b
                if boundary >= end:
                    break
            swept.append((a, point_along(self.path, end)))
        self.traveled = end
        return point_along(self.path, end), moved, swept
