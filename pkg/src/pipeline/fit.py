"""
Vectorization of a single-wall feature raster back into a WallSpec.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import MultipleWalls, NoWallFound
from ..geometry.shapes import FrameSpec, PartDesign, UnitScale, WallKind, WallSide, WallSpec
from ..raster.render import Raster
from ..segmenter.bands import Band, WallRun, edge_profile, find_band, fit_line, min_wall_px, wall_runs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureFit:
    """A fitted wall together with the bottom segment it stands on."""

    wall: WallSpec
    bottom_thickness: float
    bottom_span: tuple[float, float]
    bottom_y: float
    frame: FrameSpec

    def design(self, wall: WallSpec | None = None) -> PartDesign:
        return PartDesign(
            self.bottom_thickness,
            self.bottom_span,
            (wall or self.wall,),
            self.frame,
            self.bottom_y,
        )


def single_run(feature: Raster, band: Band) -> WallRun:
    runs = wall_runs(feature, band, min_wall_px(band))
    if not runs:
        raise NoWallFound("no wall above the bottom band")
    if len(runs) > 1:
        raise MultipleWalls(f"{len(runs)} walls in a single-feature raster")
    return runs[0]


def fit_feature(
    feature: Raster,
    kind: WallKind,
    scale: UnitScale | None = None,
    frame: FrameSpec | None = None,
) -> FeatureFit:
    """Recover the wall and its bottom segment, in frame coordinates."""
    scale = scale or UnitScale.feature()
    frame = frame or FrameSpec.feature()
    band = find_band(feature)
    run = single_run(feature, band)
    upp = scale.units_per_pixel

    def x_at(col: float) -> float:
        return frame.x_range[0] + col * upp

    def y_at(row: float) -> float:
        return frame.y_range[1] - row * upp

    profile = edge_profile(feature, band, run)
    sel = profile.window()
    if sel.sum() < 1:
        sel = np.ones_like(profile.y, dtype=bool)
    left = float(np.median(profile.left[sel]))
    right = float(np.median(profile.right[sel]))
    width = (right - left) * upp
    height = run.height(band) * upp
    span = (x_at(band.x0), x_at(band.x1))

    side = None
    center = x_at((left + right) / 2.0)
    if kind is WallKind.SIDE:
        # The outer top edge stays where it is; the bottom ends there.
        height_px = float(run.height(band))
        if run.c0 <= band.x0 + 1:
            side = WallSide.LEFT
            a, b = fit_line(profile.y[sel], profile.left[sel])
            outer = x_at(a + b * height_px)
            center, span = outer + width / 2.0, (outer, span[1])
        else:
            side = WallSide.RIGHT
            a, b = fit_line(profile.y[sel], profile.right[sel])
            outer = x_at(a + b * height_px)
            center, span = outer - width / 2.0, (span[0], outer)

    wall = WallSpec(kind, center, width, height, side=side)
    fit = FeatureFit(
        wall=wall,
        bottom_thickness=band.thickness * upp,
        bottom_span=span,
        bottom_y=y_at(band.bottom + 1),
        frame=frame,
    )
    logger.debug(
        "fitted %s wall: center %.3f width %.3f height %.3f bottom %.3f",
        kind.value,
        center,
        width,
        height,
        fit.bottom_thickness,
    )
    return fit


def fit_wall_spec(feature: Raster, kind: WallKind, scale: UnitScale | None = None) -> WallSpec:
    """Center, width (median over the middle of the wall) and height of the one wall in `feature`."""
    return fit_feature(feature, kind, scale).wall
