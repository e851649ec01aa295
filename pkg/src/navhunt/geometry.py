"""2D floor-plane geometry: segments, discs, rays, polygons.

All lengths are meters, all angles radians. Walls occlude pointing rays;
equipment is modeled as discs in the floor plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Point = tuple[float, float]


@dataclass(frozen=True)
class Segment2D:
    """A wall segment with distinct endpoints."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if (self.x1, self.y1) == (self.x2, self.y2):
            raise ValueError("segment endpoints must be distinct")


def distance(a: Point, b: Point) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def ray_segment_intersection(
    origin: Point, angle: float, seg: Segment2D
) -> float | None:
    """Distance along the ray to the segment, or None if no intersection.

    Solves origin + t*dir = s1 + u*(s2-s1) for t >= 0, 0 <= u <= 1.
    """
    dx, dy = math.cos(angle), math.sin(angle)
    ex, ey = seg.x2 - seg.x1, seg.y2 - seg.y1
    denom = dx * ey - dy * ex
    if abs(denom) < 1e-12:
        return None  # parallel (collinear grazing treated as miss)
    ox, oy = seg.x1 - origin[0], seg.y1 - origin[1]
    t = (ox * ey - oy * ex) / denom
    u = (ox * dy - oy * dx) / denom
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return t
    return None


def ray_circle_intersection(
    origin: Point, angle: float, center: Point, radius: float
) -> float | None:
    """Distance along the ray to the near edge of a disc, or None.

    An origin inside the disc intersects at distance 0.
    """
    dx, dy = math.cos(angle), math.sin(angle)
    fx, fy = origin[0] - center[0], origin[1] - center[1]
    if fx * fx + fy * fy <= radius * radius:
        return 0.0
    # |f + t*d|^2 = r^2 with |d| = 1
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - radius * radius
    disc = b * b - 4.0 * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t = (-b - sq) / 2.0
    if t >= 0.0:
        return t
    t = (-b + sq) / 2.0
    if t >= 0.0:
        return t
    return None


def segments_properly_intersect(a: Segment2D, b: Segment2D) -> bool:
    """True when the segments cross at a point interior to both."""

    def orient(px, py, qx, qy, rx, ry) -> float:
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    d1 = orient(b.x1, b.y1, b.x2, b.y2, a.x1, a.y1)
    d2 = orient(b.x1, b.y1, b.x2, b.y2, a.x2, a.y2)
    d3 = orient(a.x1, a.y1, a.x2, a.y2, b.x1, b.y1)
    d4 = orient(a.x1, a.y1, a.x2, a.y2, b.x2, b.y2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def point_in_polygon(p: Point, polygon: list[Point]) -> bool:
    """Even-odd crossing test; boundary points count as outside."""
    x, y = p
    inside = False
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xcross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xcross:
                inside = not inside
    return inside


def polygon_is_simple(polygon: list[Point]) -> bool:
    """True when no two non-adjacent edges properly cross."""
    n = len(polygon)
    if n < 3:
        return False
    edges = []
    for i in range(n):
        a, b = polygon[i], polygon[(i + 1) % n]
        if a == b:
            return False
        edges.append(Segment2D(a[0], a[1], b[0], b[1]))
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex
            if segments_properly_intersect(edges[i], edges[j]):
                return False
    return True


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    vx, vy = bx - ax, by - ay
    ll = vx * vx + vy * vy
    if ll == 0.0:
        return distance(p, a)
    t = max(0.0, min(1.0, ((px - ax) * vx + (py - ay) * vy) / ll))
    return distance(p, (ax + t * vx, ay + t * vy))


def circle_intersects_polygon(center: Point, radius: float, polygon: list[Point]) -> bool:
    """True when the disc overlaps the polygon (containment counts)."""
    if point_in_polygon(center, polygon):
        return True
    n = len(polygon)
    for i in range(n):
        if _point_segment_distance(center, polygon[i], polygon[(i + 1) % n]) <= radius:
            return True
    return False


@dataclass(frozen=True)
class Hit:
    """Nearest equipment struck by a pointing ray."""

    equipment_id: str
    distance: float


def cast_ray(
    origin: Point,
    angle: float,
    max_range: float,
    walls: list[Segment2D],
    discs: list[tuple[str, Point, float]],
) -> Hit | None:
    """Nearest disc hit strictly closer than any wall and within range.

    ``discs`` is a list of (id, center, radius). Returns None on a miss.
    """
    nearest_wall = math.inf
    for seg in walls:
        t = ray_segment_intersection(origin, angle, seg)
        if t is not None and t < nearest_wall:
            nearest_wall = t
    best: Hit | None = None
    for eq_id, center, radius in discs:
        t = ray_circle_intersection(origin, angle, center, radius)
        if t is None or t > max_range or t >= nearest_wall:
            continue
        if best is None or t < best.distance or (t == best.distance and eq_id < best.equipment_id):
            best = Hit(eq_id, t)
    return best
