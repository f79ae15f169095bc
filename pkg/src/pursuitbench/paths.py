"""Reference paths and the planar geometry queries used by the tracking laws.

All angles are radians in standard math convention (counter-clockwise
positive, zero along +x). Paths are polylines through ordered waypoints;
distance queries include segment interiors, not just the waypoints.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DegenerateGeometryError, ParameterError

_TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, _TWO_PI)
    if wrapped <= 0.0:
        wrapped += _TWO_PI
    return wrapped - math.pi


@dataclass(frozen=True)
class Pose2D:
    """Planar pose; the heading is stored wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ParameterError("pose components must be finite")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class RobotState:
    """Pose plus the linear and angular velocity currently being executed."""

    pose: Pose2D
    v: float
    omega: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ParameterError("state velocities must be finite")


class ReferencePath:
    """Ordered planar waypoints with cumulative arc-length metadata.

    Instances are immutable after construction; the exposed arrays are
    read-only views and safe to share between threads.
    """

    def __init__(self, waypoints) -> None:
        points = np.array(waypoints, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
            raise ParameterError("a path needs at least two planar waypoints")
        if not np.all(np.isfinite(points)):
            raise ParameterError("waypoints must be finite")
        segments = np.diff(points, axis=0)
        seg_lengths = np.hypot(segments[:, 0], segments[:, 1])
        if np.any(seg_lengths == 0.0):
            raise ParameterError("consecutive waypoints must be distinct")
        self._waypoints = points
        self._segments = segments
        self._seg_lengths = seg_lengths
        self._cumlen = np.concatenate(([0.0], np.cumsum(seg_lengths)))
        for arr in (self._waypoints, self._segments, self._seg_lengths, self._cumlen):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self._waypoints.shape[0]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ReferencePath({len(self)} waypoints, {self.length:.3f} m)"

    @property
    def waypoints(self) -> np.ndarray:
        return self._waypoints

    @property
    def cumulative_arclength(self) -> np.ndarray:
        return self._cumlen

    @property
    def length(self) -> float:
        """Total arc length of the polyline."""
        return float(self._cumlen[-1])

    @property
    def goal(self) -> np.ndarray:
        """Final waypoint."""
        return self._waypoints[-1]

    def to_csv(self, file: str | Path) -> None:
        """Write the waypoints as a two-column CSV with header ``x,y``."""
        with open(file, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["x", "y"])
            for x, y in self._waypoints:
                writer.writerow([repr(float(x)), repr(float(y))])

    @classmethod
    def from_csv(cls, file: str | Path) -> "ReferencePath":
        """Read a path written by :meth:`to_csv` (header ``x,y`` required)."""
        with open(file, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["x", "y"]:
                raise ParameterError(f"{file}: expected CSV header 'x,y'")
            try:
                points = [(float(row[0]), float(row[1])) for row in reader if row]
            except (IndexError, ValueError) as exc:
                raise ParameterError(f"{file}: malformed waypoint row") from exc
        return cls(points)


@dataclass(frozen=True)
class CornerPathSpec:
    """Two equal straight legs joined at a single corner.

    ``corner_angle`` is the counter-clockwise heading change between the legs
    and must stay strictly inside (0, pi); 0 would be a straight line and pi a
    fold back onto the first leg.
    """

    segment_length: float
    corner_angle: float
    waypoint_spacing: float = 0.05
    start_pose: Pose2D = Pose2D(0.0, 0.0, 0.0)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.segment_length) and self.segment_length > 0.0):
            raise ParameterError("segment_length must be positive")
        if not (0.0 < self.waypoint_spacing < self.segment_length):
            raise ParameterError("waypoint_spacing must be in (0, segment_length)")
        if not (0.0 < self.corner_angle < math.pi):
            raise ParameterError("corner_angle must be strictly inside (0, pi)")


def generate_corner_path(spec: CornerPathSpec) -> ReferencePath:
    """Sample a corner path anchored at the spec's start pose.

    The first leg leaves ``start_pose`` along its heading; the second leg's
    heading deviates counter-clockwise by ``corner_angle``. Waypoints are
    evenly spaced at approximately ``waypoint_spacing`` with both leg
    endpoints included, so the total arc length is exactly twice the
    segment length.
    """
    intervals = max(1, round(spec.segment_length / spec.waypoint_spacing))
    offsets = np.linspace(0.0, spec.segment_length, intervals + 1)
    heading_1 = spec.start_pose.theta
    heading_2 = heading_1 + spec.corner_angle
    direction_1 = np.array([math.cos(heading_1), math.sin(heading_1)])
    direction_2 = np.array([math.cos(heading_2), math.sin(heading_2)])
    start = np.array([spec.start_pose.x, spec.start_pose.y])
    leg_1 = start + np.outer(offsets, direction_1)
    leg_2 = leg_1[-1] + np.outer(offsets[1:], direction_2)
    return ReferencePath(np.vstack((leg_1, leg_2)))


class PathProjection(NamedTuple):
    """Result of projecting a position onto the path polyline.

    Attributes
    ----------
    point : np.ndarray
        Closest point on the polyline.
    segment_index : int
        Index of the segment containing the closest point.
    distance : float
        Unsigned distance from the queried position to ``point``.
    arc_length : float
        Arc length from the path start to ``point``.
    """

    point: np.ndarray
    segment_index: int
    distance: float
    arc_length: float


def nearest_point_on_path(path: ReferencePath, pose: Pose2D) -> PathProjection:
    """Closest point on the path polyline, segment interiors included.

    Ties between equidistant segments resolve to the lowest segment index so
    repeated queries are reproducible.
    """
    position = np.array([pose.x, pose.y])
    starts = path.waypoints[:-1]
    to_position = position - starts
    t = (to_position * path._segments).sum(axis=1) / path._seg_lengths**2
    t = np.clip(t, 0.0, 1.0)
    closest = starts + t[:, None] * path._segments
    offsets = position - closest
    dist_sq = (offsets * offsets).sum(axis=1)
    index = int(np.argmin(dist_sq))
    arc = float(path.cumulative_arclength[index] + t[index] * path._seg_lengths[index])
    return PathProjection(closest[index].copy(), index, math.sqrt(float(dist_sq[index])), arc)


def polyline_distances(path: ReferencePath, points: np.ndarray) -> np.ndarray:
    """Unsigned distance from each row of ``points`` (shape (n, 2)) to the path."""
    pts = np.asarray(points, dtype=float)
    starts = path.waypoints[:-1]
    to_points = pts[:, None, :] - starts[None, :, :]
    t = (to_points * path._segments[None, :, :]).sum(axis=2) / path._seg_lengths**2
    t = np.clip(t, 0.0, 1.0)
    closest = starts[None, :, :] + t[:, :, None] * path._segments[None, :, :]
    offsets = pts[:, None, :] - closest
    dist_sq = (offsets * offsets).sum(axis=2)
    return np.sqrt(dist_sq.min(axis=1))


def find_lookahead_point(path: ReferencePath, pose: Pose2D, lookahead: float) -> np.ndarray:
    """First waypoint at ``lookahead`` distance from the nearest path point.

    The search is stateless: it scans forward from the segment containing the
    nearest point and returns the first waypoint whose distance from that
    point reaches ``lookahead`` while its predecessor is still closer. When
    the remaining path never reaches the lookahead distance the final
    waypoint is returned.
    """
    if not lookahead > 0.0:
        raise ParameterError("lookahead distance must be positive")
    projection = nearest_point_on_path(path, pose)
    return lookahead_from_projection(path, projection, lookahead)


def lookahead_from_projection(
    path: ReferencePath, projection: PathProjection, lookahead: float
) -> np.ndarray:
    """Lookahead search starting from a precomputed projection."""
    points = path.waypoints
    reference = projection.point
    previous = math.hypot(*(points[projection.segment_index] - reference))
    for index in range(projection.segment_index + 1, len(points)):
        distance = math.hypot(*(points[index] - reference))
        if previous < lookahead <= distance:
            return points[index].copy()
        previous = distance
    return points[-1].copy()


def compute_curvature(pose: Pose2D, target) -> float:
    """Signed curvature of the circular arc from ``pose`` to ``target``.

    Positive curvature turns counter-clockwise (target on the robot's left).
    Raises :class:`DegenerateGeometryError` when the target coincides with
    the robot position.
    """
    dx = float(target[0]) - pose.x
    dy = float(target[1]) - pose.y
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        raise DegenerateGeometryError("lookahead target coincides with the robot position")
    heading_to_target = math.atan2(dy, dx) - pose.theta
    return 2.0 * math.sin(heading_to_target) / distance


def cross_track_error(path: ReferencePath, pose: Pose2D) -> float:
    """Unsigned lateral distance from the pose position to the path polyline."""
    return nearest_point_on_path(path, pose).distance


def remaining_distance_to_goal(path: ReferencePath, pose: Pose2D) -> float:
    """Arc length from the nearest-point projection to the final waypoint."""
    return max(0.0, path.length - nearest_point_on_path(path, pose).arc_length)
