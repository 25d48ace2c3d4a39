"""
Design -> 256x256 raster conversion.

Pixels are tested at their centers against the flattened outline; there is
no anti-aliasing, so part images stay strictly binary and mask pixels carry
exact class codes.
"""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np

from ..errors import FrameOverflow, TooManyWalls
from ..geometry.profile import flatten, profile_polygon, wall_base_extent
from ..geometry.shapes import MAX_WALLS_PER_KIND, FrameSpec, PartDesign, UnitScale, WallKind

logger = logging.getLogger(__name__)

RASTER_SIZE = 256
FOREGROUND = 255
BACKGROUND = 0
MAX_SAGITTA_PX = 0.25
_EPS = 1e-9

Raster = np.ndarray  # (256, 256) uint8


class MaskStyle(str, Enum):
    LONG = "long"
    SHORT = "short"


def blank_raster() -> Raster:
    return np.zeros((RASTER_SIZE, RASTER_SIZE), dtype=np.uint8)


def pixel_centers(frame: FrameSpec, scale: UnitScale) -> tuple[np.ndarray, np.ndarray]:
    """Unit coordinates of column centers (x) and row centers (y, top row first)."""
    idx = np.arange(RASTER_SIZE, dtype=float) + 0.5
    xs = frame.x_range[0] + idx * scale.units_per_pixel
    ys = frame.y_range[1] - idx * scale.units_per_pixel
    return xs, ys


def _fill_outline(points: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Even-odd scanline fill; pixels whose center lies on the boundary count as inside."""
    a = points
    b = np.roll(points, -1, axis=0)
    y_lo = np.minimum(a[:, 1], b[:, 1])
    y_hi = np.maximum(a[:, 1], b[:, 1])
    inside = np.zeros((len(ys), len(xs)), dtype=bool)
    for row, y in enumerate(ys):
        active = (y_lo <= y) & (y < y_hi)
        if not np.any(active):
            continue
        pa, pb = a[active], b[active]
        t = (y - pa[:, 1]) / (pb[:, 1] - pa[:, 1])
        crossings = np.sort(pa[:, 0] + t * (pb[:, 0] - pa[:, 0]))
        starts = crossings[0::2]
        ends = crossings[1::2]
        lo = np.searchsorted(xs, starts - _EPS, side="left")
        hi = np.searchsorted(xs, ends + _EPS, side="right")
        for s, e in zip(lo, hi):
            inside[row, s:e] = True
    return inside


def _check_frame(points: np.ndarray, frame: FrameSpec) -> None:
    x_min, y_min = points.min(axis=0)
    x_max, y_max = points.max(axis=0)
    if (
        x_min < frame.x_range[0] - _EPS
        or x_max > frame.x_range[1] + _EPS
        or y_min < frame.y_range[0] - _EPS
        or y_max > frame.y_range[1] + _EPS
    ):
        raise FrameOverflow(
            f"geometry [{x_min:.3f}, {x_max:.3f}] x [{y_min:.3f}, {y_max:.3f}] "
            f"exceeds frame {frame.x_range} x {frame.y_range}"
        )


def _inside_mask(design: PartDesign, frame: FrameSpec, scale: UnitScale) -> np.ndarray:
    points = flatten(profile_polygon(design), MAX_SAGITTA_PX * scale.units_per_pixel)
    _check_frame(points, frame)
    xs, ys = pixel_centers(frame, scale)
    return _fill_outline(points, xs, ys)


def rasterize(
    design: PartDesign,
    frame: FrameSpec | None = None,
    scale: UnitScale | None = None,
) -> Raster:
    """Binary part image: 255 where the pixel center lies inside the profile."""
    frame = frame or design.frame
    scale = scale or UnitScale(frame.width / RASTER_SIZE)
    image = blank_raster()
    image[_inside_mask(design, frame, scale)] = FOREGROUND
    return image


def instance_codes(design: PartDesign) -> list[int]:
    """Two-digit mask code per wall: tens = kind digit, ones = left-to-right instance."""
    counts = design.kind_counts()
    for kind, count in counts.items():
        if count > MAX_WALLS_PER_KIND:
            raise TooManyWalls(f"{count} {kind.value} walls; at most {MAX_WALLS_PER_KIND} fit the mask code")
    seen = {kind: 0 for kind in WallKind}
    codes = []
    for wall in design.walls:
        seen[wall.kind] += 1
        codes.append(10 * wall.kind.mask_digit + seen[wall.kind])
    return codes


def _partition_splits(design: PartDesign) -> list[float]:
    """x positions halfway across each gap between neighbouring walls."""
    extents = [wall_base_extent(w) for w in design.walls]
    return [(left[1] + right[0]) / 2.0 for left, right in zip(extents, extents[1:])]


def render_mask(
    design: PartDesign,
    style: MaskStyle = MaskStyle.LONG,
    frame: FrameSpec | None = None,
    scale: UnitScale | None = None,
) -> Raster:
    """Instance mask: wall pixels carry their code, bottom pixels are split per style."""
    codes = instance_codes(design)
    frame = frame or design.frame
    scale = scale or UnitScale(frame.width / RASTER_SIZE)
    mask = blank_raster()
    if not design.walls:
        return mask

    inside = _inside_mask(design, frame, scale)
    xs, ys = pixel_centers(frame, scale)
    owner = np.searchsorted(np.asarray(_partition_splits(design)), xs)  # per column
    code_by_column = np.asarray(codes, dtype=np.uint8)[owner]

    above = ys > design.top_y + _EPS
    mask[above[:, None] & inside] = np.broadcast_to(code_by_column, mask.shape)[above[:, None] & inside]

    band = (~above)[:, None] & inside
    if style is MaskStyle.LONG:
        mask[band] = np.broadcast_to(code_by_column, mask.shape)[band]
        return mask

    margin = 0.5 * design.bottom_thickness
    strip_codes = np.zeros(RASTER_SIZE, dtype=np.uint8)
    for wall, code in zip(design.walls, codes):
        lo, hi = wall_base_extent(wall)
        columns = (xs >= lo - margin) & (xs <= hi + margin)
        strip_codes[columns] = code
    mask[band] = np.broadcast_to(strip_codes, mask.shape)[band]
    return mask


def visualize_mask(mask: Raster) -> Raster:
    """x8 intensity copy of a raw-code mask for viewing."""
    return np.clip(mask.astype(np.int32) * 8, 0, 255).astype(np.uint8)
