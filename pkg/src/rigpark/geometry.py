"""Planar geometry primitives: poses, oriented boxes, angle arithmetic.

Everything here is a pure function over immutable values, so the module is
safe to use from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Wrap an angle (radians) into (-pi, pi].

    The interval is half-open with +pi retained, so -pi maps to +pi. Angles
    already in range are returned unchanged (exact idempotence).
    """
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    if -math.pi < angle <= math.pi:
        return angle
    return -((math.pi - angle) % TWO_PI - math.pi)


@dataclass(frozen=True)
class Pose2:
    """Position in meters plus heading, normalized to (-pi, pi] on construction."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("pose coordinates must be finite")
        object.__setattr__(self, "heading", normalize_angle(self.heading))


@dataclass(frozen=True)
class OrientedBox:
    """Closed rectangle: center pose plus body-frame length x width (meters)."""

    center: Pose2
    length: float
    width: float

    def __post_init__(self):
        if not (self.length > 0.0 and self.width > 0.0):
            raise ValueError("box length and width must be positive")

    def corners(self) -> list[tuple[float, float]]:
        """The four corner points, counterclockwise starting front-left."""
        c = math.cos(self.center.heading)
        s = math.sin(self.center.heading)
        hl = 0.5 * self.length
        hw = 0.5 * self.width
        return [
            (self.center.x + dx * c - dy * s, self.center.y + dx * s + dy * c)
            for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
        ]

    def circumradius(self) -> float:
        return math.hypot(0.5 * self.length, 0.5 * self.width)


def _projected_interval(corners, ax: float, ay: float) -> tuple[float, float]:
    lo = hi = corners[0][0] * ax + corners[0][1] * ay
    for x, y in corners[1:]:
        d = x * ax + y * ay
        if d < lo:
            lo = d
        elif d > hi:
            hi = d
    return lo, hi


def corners_overlap(ca, cb, heading_a: float, heading_b: float) -> bool:
    """Separating-axis test on two rectangles given by corner lists."""
    for heading in (heading_a, heading_b):
        c = math.cos(heading)
        s = math.sin(heading)
        for ax, ay in ((c, s), (-s, c)):
            alo, ahi = _projected_interval(ca, ax, ay)
            blo, bhi = _projected_interval(cb, ax, ay)
            if ahi < blo or bhi < alo:
                return False
    return True


def boxes_overlap(a: OrientedBox, b: OrientedBox) -> bool:
    """True iff the closed rectangles intersect; touching counts as overlap.

    Symmetric in its arguments. A center-distance prefilter rejects far-apart
    pairs before the separating-axis test runs.
    """
    dx = b.center.x - a.center.x
    dy = b.center.y - a.center.y
    if math.hypot(dx, dy) > a.circumradius() + b.circumradius():
        return False
    return corners_overlap(a.corners(), b.corners(), a.center.heading, b.center.heading)


def box_contains_point(box: OrientedBox, point: tuple[float, float]) -> bool:
    """True iff the point lies in the closed rectangle (boundary included)."""
    c = math.cos(box.center.heading)
    s = math.sin(box.center.heading)
    dx = point[0] - box.center.x
    dy = point[1] - box.center.y
    u = dx * c + dy * s
    v = -dx * s + dy * c
    return abs(u) <= 0.5 * box.length and abs(v) <= 0.5 * box.width
