"""
Classical wall detector for binary housing images.

Stands in for a learned instance segmenter: the bottom band is located,
the foreground above it is split into column runs, and each run becomes
one wall feature with a class, a box, an instance mask and a score.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..geometry.shapes import WallKind
from ..raster.frames import PixelBox
from ..raster.render import FOREGROUND, MaskStyle, Raster, blank_raster
from .bands import (
    Band,
    WallRun,
    base_faces,
    binary,
    edge_profile,
    find_band,
    median_width,
    min_wall_px,
    wall_runs,
)

logger = logging.getLogger(__name__)

THIN_THICK_THRESHOLD = 1.1  # units
SHORT_MASK_MARGIN = 0.5  # units of bottom thickness


@dataclass(frozen=True)
class DetectedFeature:
    kind: WallKind
    box: PixelBox
    mask: Raster
    score: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("score must lie in [0, 1]")

    def to_record(self) -> dict:
        return {"kind": self.kind.value, "box": list(self.box.as_tuple()), "score": self.score}


def classify_run(image: Raster, band: Band, run: WallRun) -> tuple[WallKind, float]:
    """Kind and measured width (units) of one run."""
    profile = edge_profile(image, band, run)
    width_units = median_width(profile) / band.thickness
    if run.c0 <= band.x0 + 1 or run.c1 >= band.x1 - 1:
        return WallKind.SIDE, width_units
    if width_units <= THIN_THICK_THRESHOLD:
        return WallKind.THIN, width_units
    return WallKind.THICK, width_units


def _splits(runs: list[WallRun]) -> list[int]:
    return [(left.c1 + right.c0) // 2 for left, right in zip(runs, runs[1:])]


def _feature_mask(
    fg: np.ndarray,
    band: Band,
    run: WallRun,
    column_range: tuple[int, int],
    strip: tuple[int, int],
    style: MaskStyle,
) -> np.ndarray:
    mask = blank_raster()
    above = fg[: band.top, run.c0:run.c1]
    mask[: band.top, run.c0:run.c1][above] = FOREGROUND
    lo, hi = column_range if style is MaskStyle.LONG else strip
    lo, hi = max(lo, band.x0), min(hi, band.x1)
    if hi > lo:
        rows = slice(band.top, band.bottom + 1)
        mask[rows, lo:hi][fg[rows, lo:hi]] = FOREGROUND
    return mask


def detect_walls(image: Raster, style: MaskStyle = MaskStyle.LONG) -> list[DetectedFeature]:
    """One feature per wall standing on the bottom band, left to right."""
    band = find_band(image)
    fg = binary(image)
    runs = wall_runs(image, band, min_wall_px(band))
    splits = _splits(runs)
    margin = SHORT_MASK_MARGIN * band.thickness

    features: list[DetectedFeature] = []
    for i, run in enumerate(runs):
        kind, width = classify_run(image, band, run)
        column_range = (splits[i - 1] if i > 0 else band.x0, splits[i] if i < len(splits) else band.x1)
        face_left, face_right = base_faces(edge_profile(image, band, run))
        strip = (int(np.ceil(face_left - margin - 0.5)), int(np.floor(face_right + margin - 0.5)) + 1)
        mask = _feature_mask(fg, band, run, column_range, strip, style)
        box = PixelBox.tight(mask > 0)
        if box is None:
            continue
        features.append(DetectedFeature(kind, box, mask, 1.0))
        logger.debug("wall %d: %s width %.3f units box %s", i, kind.value, width, box.as_tuple())
    return features
