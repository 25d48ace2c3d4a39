"""
Part-frame <-> feature-frame translate/resize scheme.

A feature crop is magnified so one physical unit spans the same number of
pixels as in the 6.6-units-per-256-px feature frame, centered horizontally,
with the bottom-wall lower edge half a unit above the frame bottom.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import CropTooLarge
from ..geometry.shapes import FEATURE_UNITS_PER_PIXEL, PART_UNITS_PER_PIXEL, UnitScale
from .render import BACKGROUND, FOREGROUND, RASTER_SIZE, Raster, blank_raster

logger = logging.getLogger(__name__)

THRESHOLD = 128
FEATURE_BOTTOM_MARGIN = 0.5  # units between frame bottom and bottom-wall lower edge


@dataclass(frozen=True)
class PixelBox:
    """Half-open pixel box [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self) -> None:
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.x1, self.y1)

    def clamp(self, width: int = RASTER_SIZE, height: int = RASTER_SIZE) -> "PixelBox":
        return PixelBox(max(0, self.x0), max(0, self.y0), min(width, self.x1), min(height, self.y1))

    @classmethod
    def tight(cls, mask: np.ndarray) -> "PixelBox | None":
        rows = np.flatnonzero(mask.any(axis=1))
        cols = np.flatnonzero(mask.any(axis=0))
        if rows.size == 0:
            return None
        return cls(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1)


@dataclass(frozen=True)
class CropTransform:
    """Feature coordinate = (part coordinate - box origin) * scale_factor + dest_offset."""

    source_box: PixelBox
    scale_factor: float
    dest_offset: tuple[float, float]  # (dx, dy) in feature pixels

    def __post_init__(self) -> None:
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")

    def to_feature(self, x: float, y: float) -> tuple[float, float]:
        m = self.scale_factor
        return ((x - self.source_box.x0) * m + self.dest_offset[0], (y - self.source_box.y0) * m + self.dest_offset[1])

    def to_part(self, fx: float, fy: float) -> tuple[float, float]:
        m = self.scale_factor
        return ((fx - self.dest_offset[0]) / m + self.source_box.x0, (fy - self.dest_offset[1]) / m + self.source_box.y0)


def _binarize(values: np.ndarray) -> Raster:
    return np.where(values >= THRESHOLD, FOREGROUND, BACKGROUND).astype(np.uint8)


def crop_to_feature_frame(
    image: Raster,
    box: PixelBox,
    unit_scale: UnitScale | None = None,
) -> tuple[Raster, CropTransform]:
    """Resample the box region into the feature frame (bilinear, then threshold at 128).

    `unit_scale` is the physical size of a part pixel; by default the canonical
    10/256, giving a magnification of 10/6.6.
    """
    unit_scale = unit_scale or UnitScale(PART_UNITS_PER_PIXEL)
    box = box.clamp(image.shape[1], image.shape[0])
    m = unit_scale.units_per_pixel / FEATURE_UNITS_PER_PIXEL

    if box.width * m > RASTER_SIZE or box.height * m > RASTER_SIZE:
        raise CropTooLarge(f"box {box.as_tuple()} magnified x{m:.3f} exceeds {RASTER_SIZE} px")

    region = image[box.y0:box.y1, box.x0:box.x1]
    rows = np.flatnonzero(region.any(axis=1))
    # Part-pixel row (box-relative, continuous) of the bottom-wall lower edge.
    lower_edge = float(rows[-1] + 1) if rows.size else float(box.height)
    target_edge = RASTER_SIZE - FEATURE_BOTTOM_MARGIN / FEATURE_UNITS_PER_PIXEL
    dy = target_edge - lower_edge * m
    dx = RASTER_SIZE / 2.0 - box.width * m / 2.0
    if rows.size and dy + rows[0] * m < 0:
        raise CropTooLarge(f"content of box {box.as_tuple()} rises above the feature frame")

    transform = CropTransform(box, m, (dx, dy))
    if rows.size == 0:
        return blank_raster(), transform

    inv = 1.0 / m
    sampled = ndimage.affine_transform(
        region.astype(np.float64),
        matrix=[inv, inv],
        offset=[(0.5 - dy) * inv - 0.5, (0.5 - dx) * inv - 0.5],
        output_shape=(RASTER_SIZE, RASTER_SIZE),
        order=1,
        mode="constant",
        cval=0.0,
    )
    return _binarize(sampled), transform


@dataclass(frozen=True)
class PasteResult:
    canvas: Raster
    overflow: bool  # content landed outside the source box columns or off the canvas


def paste_from_feature_frame(canvas: Raster, feature: Raster, t: CropTransform) -> PasteResult:
    """Replace the source-box region of a copy of `canvas` with the inverse-mapped feature.

    Foreground mapped beside the box (same rows) is added as well, so widened
    bases can spill past the original bounding box; it is clamped to the canvas.
    """
    m = t.scale_factor
    box = t.source_box
    dx, dy = t.dest_offset
    mapped = _binarize(
        ndimage.affine_transform(
            feature.astype(np.float64),
            matrix=[m, m],
            offset=[(0.5 - box.y0) * m + dy - 0.5, (0.5 - box.x0) * m + dx - 0.5],
            output_shape=canvas.shape,
            order=1,
            mode="constant",
            cval=0.0,
        )
    )

    out = canvas.copy()
    rows = slice(box.y0, box.y1)
    out[rows, box.x0:box.x1] = mapped[rows, box.x0:box.x1]
    beside = mapped[rows].copy()
    beside[:, box.x0:box.x1] = BACKGROUND
    spilled = bool(beside.any())
    out[rows] = np.maximum(out[rows], beside)

    off_canvas = False
    fg = np.argwhere(feature >= THRESHOLD)
    if fg.size:
        x_lo, y_lo = t.to_part(float(fg[:, 1].min()), float(fg[:, 0].min()))
        x_hi, y_hi = t.to_part(float(fg[:, 1].max() + 1), float(fg[:, 0].max() + 1))
        off_canvas = x_lo < 0 or y_lo < 0 or x_hi > canvas.shape[1] or y_hi > canvas.shape[0]
    if spilled or off_canvas:
        logger.debug("paste of box %s spilled outside its box", box.as_tuple())
    return PasteResult(out, spilled or off_canvas)
