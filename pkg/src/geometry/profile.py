"""
Realization of housing designs as closed line+arc outlines.

Handles:
- Building the sharp outline of bottom wall + walls (draft and coring applied)
- Replacing corners with tangent arcs (fillets and rounds)
- Exact area, flattening and simplicity checks
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..errors import GeometryError, OverlapError
from .shapes import DraftDirection, PartDesign, WallKind, WallSide, WallSpec

logger = logging.getLogger(__name__)

EPS = 1e-9

Point = tuple[float, float]


@dataclass(frozen=True)
class Arc:
    center: Point
    radius: float
    sweep: float  # signed radians, positive = counterclockwise


@dataclass(frozen=True)
class Polygon:
    """Closed outline; edge i runs from vertices[i] to vertices[i+1] (wrapping)."""

    vertices: tuple[Point, ...]
    arcs: tuple[Optional[Arc], ...]

    def __post_init__(self) -> None:
        if len(self.vertices) != len(self.arcs):
            raise ValueError("one arc slot per edge is required")
        if len(self.vertices) < 2:
            raise ValueError("a polygon needs at least two vertices")

    @classmethod
    def from_points(cls, points: Sequence[Point]) -> "Polygon":
        return cls(tuple((float(x), float(y)) for x, y in points), (None,) * len(points))

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n], self.arcs[i]


@dataclass(frozen=True)
class _Corner:
    point: Point
    radius: float = 0.0
    cap: bool = False  # shares its top edge with a twin corner; shrink to a full round if needed


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def _cross(a: Point, b: Point) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _length(a: Point) -> float:
    return math.hypot(a[0], a[1])


def _draft_run(height: float, draft_deg: float) -> float:
    return height * math.tan(math.radians(draft_deg))


def wall_base_extent(wall: WallSpec) -> tuple[float, float]:
    """Horizontal extent of a wall where it meets the bottom-wall top surface."""
    run = _draft_run(wall.height, wall.treatment.draft_deg)
    if wall.kind is WallKind.SIDE:
        if wall.side is WallSide.LEFT:
            return wall.left - run, wall.right
        return wall.left, wall.right + run
    if wall.treatment.draft_direction is DraftDirection.OUTWARD:
        raise GeometryError("outward draft applies to side walls only")
    return wall.left - run, wall.right + run


def slot_ceiling_width(wall: WallSpec) -> float:
    """Width of a cored wall's slot at its ceiling (shell thickness below the top)."""
    if wall.treatment.core is None:
        return 0.0
    shell = wall.treatment.core.shell_thickness
    run = _draft_run(shell, wall.treatment.draft_deg)
    return wall.top_width + 2.0 * run - 2.0 * shell


def _slot_corners(wall: WallSpec, bottom_y: float, top_y: float) -> list[_Corner]:
    """Slot outline, walked left to right along the bottom edge."""
    core = wall.treatment.core
    assert core is not None
    shell = core.shell_thickness
    tan_d = math.tan(math.radians(wall.treatment.draft_deg))
    wall_top = top_y + wall.height
    ceiling = wall_top - shell
    if ceiling <= top_y + EPS:
        raise GeometryError("core shell leaves no room for a slot above the bottom wall")

    def face_left(y: float) -> float:
        return wall.left + shell - (wall_top - y) * tan_d

    def face_right(y: float) -> float:
        return wall.right - shell + (wall_top - y) * tan_d

    width = face_right(ceiling) - face_left(ceiling)
    if width <= EPS:
        raise GeometryError(
            f"core shell {shell:.3f} leaves no slot in a wall {wall.top_width:.3f} wide"
        )
    slot_radius = min(wall.treatment.top_round_radius, 0.45 * width)
    return [
        _Corner((face_left(bottom_y), bottom_y)),
        _Corner((face_left(ceiling), ceiling), slot_radius),
        _Corner((face_right(ceiling), ceiling), slot_radius),
        _Corner((face_right(bottom_y), bottom_y)),
    ]


def _interior_corners(wall: WallSpec, top_y: float) -> list[_Corner]:
    """Right base, right top, left top, left base (walked right to left)."""
    t = wall.treatment
    base_left, base_right = wall_base_extent(wall)
    wall_top = top_y + wall.height
    return [
        _Corner((base_right, top_y), t.base_fillet_radius),
        _Corner((wall.right, wall_top), t.top_round_radius, cap=True),
        _Corner((wall.left, wall_top), t.top_round_radius, cap=True),
        _Corner((base_left, top_y), t.base_fillet_radius),
    ]


def _check_disjoint(design: PartDesign) -> None:
    walls = design.walls
    for left, right in zip(walls, walls[1:]):
        if wall_base_extent(left)[1] > wall_base_extent(right)[0] - EPS:
            raise OverlapError(
                f"walls at x={left.center_x:.3f} and x={right.center_x:.3f} overlap"
            )
    x0, x1 = design.bottom_span
    for wall in walls:
        lo, hi = wall.left, wall.right
        if wall.kind is WallKind.SIDE:
            continue
        if lo < x0 - EPS or hi > x1 + EPS:
            raise OverlapError(f"wall at x={wall.center_x:.3f} overhangs the bottom wall")


def _sharp_outline(design: PartDesign) -> list[_Corner]:
    """Counterclockwise corner list of the treated outline before filleting."""
    _check_disjoint(design)
    x0, x1 = design.bottom_span
    y0, top = design.bottom_y, design.top_y
    walls = list(design.walls)

    left_side = walls[0] if walls and walls[0].kind is WallKind.SIDE and walls[0].side is WallSide.LEFT else None
    right_side = walls[-1] if walls and walls[-1].kind is WallKind.SIDE and walls[-1].side is WallSide.RIGHT else None
    interior = [w for w in walls if w is not left_side and w is not right_side]
    for wall in interior:
        if wall.kind is WallKind.SIDE:
            raise GeometryError("side walls must stand at an end of the bottom wall")

    flare_left = _draft_run(left_side.height, left_side.treatment.draft_deg) if left_side else 0.0
    flare_right = _draft_run(right_side.height, right_side.treatment.draft_deg) if right_side else 0.0
    start_x = (left_side.left if left_side else x0) - flare_left
    end_x = (right_side.right if right_side else x1) + flare_right

    corners: list[_Corner] = [_Corner((start_x, y0))]

    # Bottom edge, left to right, dipping into any core slots.
    for wall in interior:
        if wall.treatment.core is not None:
            corners.extend(_slot_corners(wall, y0, top))

    corners.append(_Corner((end_x, y0)))

    if right_side is not None:
        t = right_side.treatment
        wall_top = top + right_side.height
        corners.append(_Corner((end_x, top)))
        corners.append(_Corner((right_side.right, wall_top), t.top_round_radius, cap=True))
        corners.append(_Corner((right_side.left, wall_top), t.top_round_radius, cap=True))
        corners.append(_Corner((right_side.left, top), t.base_fillet_radius))
    else:
        corners.append(_Corner((end_x, top)))

    for wall in reversed(interior):
        corners.extend(_interior_corners(wall, top))

    if left_side is not None:
        t = left_side.treatment
        wall_top = top + left_side.height
        corners.append(_Corner((left_side.right, top), t.base_fillet_radius))
        corners.append(_Corner((left_side.right, wall_top), t.top_round_radius, cap=True))
        corners.append(_Corner((left_side.left, wall_top), t.top_round_radius, cap=True))
        corners.append(_Corner((start_x, top)))
    else:
        corners.append(_Corner((start_x, top)))

    # Drop collinear duplicates (e.g. a flare of zero).
    cleaned: list[_Corner] = []
    for corner in corners:
        if cleaned and _length(_sub(corner.point, cleaned[-1].point)) < EPS:
            continue
        cleaned.append(corner)
    if _length(_sub(cleaned[0].point, cleaned[-1].point)) < EPS:
        cleaned.pop()
    return cleaned


def _tangent_lengths(corners: list[_Corner]) -> list[tuple[float, float, float]]:
    """(effective radius, tangent length, signed turn) for every corner."""
    n = len(corners)
    turns = []
    for i, corner in enumerate(corners):
        prev_pt = corners[i - 1].point
        next_pt = corners[(i + 1) % n].point
        d1 = _sub(corner.point, prev_pt)
        d2 = _sub(next_pt, corner.point)
        turn = math.atan2(_cross(d1, d2), d1[0] * d2[0] + d1[1] * d2[1])
        turns.append(turn)

    result = []
    for i, corner in enumerate(corners):
        turn = turns[i]
        radius = corner.radius
        if radius <= 0 or abs(turn) < EPS:
            result.append((0.0, 0.0, turn))
            continue
        half_tan = math.tan(abs(turn) / 2.0)
        tangent = radius * half_tan
        if corner.cap:
            # The top edge is shared with the twin corner; at most half of it each.
            j = (i + 1) % n if corners[(i + 1) % n].cap else i - 1
            top_len = _length(_sub(corners[j].point, corner.point))
            if tangent > top_len / 2.0:
                tangent = top_len / 2.0
                radius = tangent / half_tan
        result.append((radius, tangent, turn))
    return result


def _fillet(corners: list[_Corner]) -> Polygon:
    n = len(corners)
    tangents = _tangent_lengths(corners)

    for i in range(n):
        a, b = corners[i].point, corners[(i + 1) % n].point
        edge = _length(_sub(b, a))
        need = tangents[i][1] + tangents[(i + 1) % n][1]
        if need > edge + 1e-7:
            raise GeometryError(
                f"fillet tangents need {need:.4f} units on an edge of {edge:.4f} units"
            )

    vertices: list[Point] = []
    arcs: list[Optional[Arc]] = []
    for i, corner in enumerate(corners):
        radius, tangent, turn = tangents[i]
        if tangent <= 0:
            vertices.append(corner.point)
            arcs.append(None)
            continue
        prev_pt = corners[i - 1].point
        next_pt = corners[(i + 1) % n].point
        d1 = _sub(corner.point, prev_pt)
        d2 = _sub(next_pt, corner.point)
        l1, l2 = _length(d1), _length(d2)
        u1 = (d1[0] / l1, d1[1] / l1)
        u2 = (d2[0] / l2, d2[1] / l2)
        start = (corner.point[0] - u1[0] * tangent, corner.point[1] - u1[1] * tangent)
        end = (corner.point[0] + u2[0] * tangent, corner.point[1] + u2[1] * tangent)
        normal = (-u1[1], u1[0]) if turn > 0 else (u1[1], -u1[0])
        center = (start[0] + normal[0] * radius, start[1] + normal[1] * radius)
        vertices.append(start)
        arcs.append(Arc(center, radius, turn))
        vertices.append(end)
        arcs.append(None)

    # Twin caps meet at one point when the top is fully rounded.
    out_v: list[Point] = []
    out_a: list[Optional[Arc]] = []
    for v, a in zip(vertices, arcs):
        if out_v and _length(_sub(v, out_v[-1])) < 1e-12 and out_a[-1] is None:
            out_v[-1] = v
            out_a[-1] = a
            continue
        out_v.append(v)
        out_a.append(a)
    return Polygon(tuple(out_v), tuple(out_a))


def profile_polygon(design: PartDesign) -> Polygon:
    """Union outline of the bottom wall and every treated wall, counterclockwise."""
    polygon = _fillet(_sharp_outline(design))
    logger.debug("profile with %d edges for %d walls", len(polygon.vertices), len(design.walls))
    return polygon


def flatten(polygon: Polygon, max_sagitta: float) -> np.ndarray:
    """Vertex array (N, 2) with every arc replaced by chords of bounded sagitta."""
    points: list[Point] = []
    for start, _end, arc in polygon.edges():
        points.append(start)
        if arc is None:
            continue
        cx, cy = arc.center
        a0 = math.atan2(start[1] - cy, start[0] - cx)
        ratio = max(-1.0, min(1.0, 1.0 - max_sagitta / arc.radius)) if arc.radius > 0 else -1.0
        step = 2.0 * math.acos(ratio) if ratio < 1.0 else abs(arc.sweep)
        count = max(1, int(math.ceil(abs(arc.sweep) / max(step, 1e-6))))
        for k in range(1, count):
            angle = a0 + arc.sweep * k / count
            points.append((cx + arc.radius * math.cos(angle), cy + arc.radius * math.sin(angle)))
    return np.asarray(points, dtype=float)


def _segments_cross(points: np.ndarray) -> bool:
    """True when two non-adjacent edges of a closed chain properly intersect."""
    a = points
    b = np.roll(points, -1, axis=0)
    n = len(a)
    if n < 4:
        return False
    d = b - a
    ax, ay = a[:, 0][:, None], a[:, 1][:, None]
    dx, dy = d[:, 0][:, None], d[:, 1][:, None]
    cx, cy = a[:, 0][None, :], a[:, 1][None, :]
    ex, ey = d[:, 0][None, :], d[:, 1][None, :]
    denom = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        s = ((cx - ax) * ey - (cy - ay) * ex) / denom
        u = ((cx - ax) * dy - (cy - ay) * dx) / denom
    hits = (np.abs(denom) > 1e-15) & (s > 1e-9) & (s < 1 - 1e-9) & (u > 1e-9) & (u < 1 - 1e-9)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (np.abs(idx[:, None] - idx[None, :]) == n - 1)
    return bool(np.any(hits & ~adjacent))


def is_simple(polygon: Polygon, max_sagitta: float = 1e-3) -> bool:
    return not _segments_cross(flatten(polygon, max_sagitta))


def polygon_area(polygon: Polygon) -> float:
    """Exact area: shoelace over the vertices plus circular-segment terms for arcs."""
    if not is_simple(polygon):
        raise GeometryError("polygon is self-intersecting")
    area = 0.0
    for start, end, arc in polygon.edges():
        if arc is None:
            area += _cross(start, end) / 2.0
        else:
            area += _cross(arc.center, _sub(end, start)) / 2.0 + arc.radius**2 * arc.sweep / 2.0
    if area <= 0:
        raise GeometryError("polygon has non-positive area (clockwise or degenerate)")
    return area


def fillet_polygon(points: Sequence[Point], radii: Sequence[float]) -> Polygon:
    """Round the corners of a counterclockwise point loop with per-vertex radii."""
    if len(points) != len(radii):
        raise ValueError("one radius per vertex is required")
    corners = [_Corner((float(x), float(y)), float(r)) for (x, y), r in zip(points, radii)]
    return _fillet(corners)
