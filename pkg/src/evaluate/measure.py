"""
Raster measurement of a single wall: widths, height, draft per face,
corner radii and coring.

A binary edge only pins a face to within one pixel per row, so each face
reports the slope interval of lines that stay inside the pixel corridor
of every straight row; its midpoint is the draft estimate and its half
width is the quantization uncertainty. Corner radii are found by
rendering candidate rounded corners against the fitted face and top (or
band) lines and keeping the radius whose pixels disagree least with the
image. The straight part of each face is then taken between the measured
corners, so sharp walls are fitted over their full height.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import ndimage

from ..errors import NoWallFound
from ..geometry.shapes import UnitScale, WallKind, WallSide
from ..raster.render import Raster
from ..segmenter.bands import (
    Band,
    EdgeProfile,
    WallRun,
    binary,
    edge_profile,
    find_band,
    fit_line,
    min_wall_px,
    wall_runs,
)
from ..segmenter.detect import classify_run

logger = logging.getLogger(__name__)

# Edge displacement (px) allowed on top of pixel-center quantization; covers
# the bilinear paste of a feature back onto a part canvas.
EDGE_TOLERANCE_PX = 0.4
RADIUS_STEP_PX = 0.25
_SLOPE_STEP_DEG = 0.01
_SLOPE_GRID_DEG = np.round(np.arange(-6.0, 6.0 + _SLOPE_STEP_DEG / 2, _SLOPE_STEP_DEG), 4)
_CORNER_WINDOW = 1.0  # units searched below a top / above the band at each corner
_CORNER_CLEARANCE_PX = 3.0
_MIN_FACE_ROWS = 3
# Rows the arc still occupies past a radius, as a fraction of it.
_TANGENT_FACTOR = 1.05


@dataclass(frozen=True)
class FaceDraft:
    """Draft of one face in degrees, positive for the rule's lean direction."""

    estimate_deg: float
    half_width_deg: float

    def admits(self, target: float, tolerance: float) -> bool:
        """True unless the estimate is off target by more than both the tolerance and its own uncertainty."""
        return abs(self.estimate_deg - target) <= max(tolerance, self.half_width_deg)


@dataclass(frozen=True)
class WallMeasurement:
    kind: WallKind
    side: Optional[WallSide]
    box_columns: tuple[int, int]
    width_top: float
    width_base: float
    height: float
    draft_left: FaceDraft
    draft_right: FaceDraft
    top_round_left: float
    top_round_right: float
    base_fillet_left: float
    base_fillet_right: float
    cored: bool = False
    shell_left: float = 0.0
    shell_right: float = 0.0
    units_per_pixel: float = 1.0

    @property
    def draft_deg_left(self) -> float:
        return self.draft_left.estimate_deg

    @property
    def draft_deg_right(self) -> float:
        return self.draft_right.estimate_deg

    @property
    def top_round_radius(self) -> float:
        return (self.top_round_left + self.top_round_right) / 2.0

    @property
    def base_fillet_radius(self) -> float:
        if self.side is WallSide.LEFT:
            return self.base_fillet_right
        if self.side is WallSide.RIGHT:
            return self.base_fillet_left
        return (self.base_fillet_left + self.base_fillet_right) / 2.0

    @property
    def shell_thickness(self) -> float:
        return (self.shell_left + self.shell_right) / 2.0 if self.cored else 0.0


@dataclass(frozen=True)
class _FaceFit:
    draft: FaceDraft
    intercept: float  # x at the band top, px
    slope: float  # dx/dy, px per px


def _fit_face(y: np.ndarray, x: np.ndarray, lean_sign: float, tolerance: float = EDGE_TOLERANCE_PX) -> _FaceFit:
    """Center of the set of lines within `tolerance` px of every row's pixel corridor.

    lean_sign is +1 when x grows with height for a positive draft. When no
    grid slope fits (disturbed edges) the corridor is widened, and as a last
    resort the least-squares line is returned with the widest uncertainty.
    """
    if y.size < _MIN_FACE_ROWS:
        a, b = fit_line(y, x)
        return _FaceFit(FaceDraft(math.degrees(math.atan(lean_sign * b)), float(_SLOPE_GRID_DEG[-1])), a, b)

    slopes = lean_sign * np.tan(np.radians(_SLOPE_GRID_DEG))
    residuals = x[None, :] - slopes[:, None] * y[None, :]
    spread = residuals.max(axis=1) - residuals.min(axis=1)
    for _ in range(4):
        ok = spread < 1.0 + 2.0 * tolerance
        if ok.any():
            break
        tolerance *= 2.0
    if not ok.any():
        a, b = fit_line(y, x)
        logger.debug("face fits no line within %.2f px; using least squares", tolerance)
        return _FaceFit(FaceDraft(math.degrees(math.atan(lean_sign * b)), float(_SLOPE_GRID_DEG[-1])), a, b)

    angles = _SLOPE_GRID_DEG[ok]
    lo, hi = float(angles.min()), float(angles.max())
    estimate = (lo + hi) / 2.0
    slope = lean_sign * math.tan(math.radians(estimate))
    r = x - slope * y
    intercept = float(r.max() + r.min()) / 2.0
    return _FaceFit(FaceDraft(estimate, (hi - lo) / 2.0 + _SLOPE_STEP_DEG / 2.0), intercept, slope)


def _best_radius(radii: np.ndarray, mismatches: np.ndarray) -> float:
    return float(radii[mismatches == mismatches.min()].mean())


def _top_round(
    fg: np.ndarray,
    band: Band,
    run: WallRun,
    face: _FaceFit,
    top_px: float,
    direction: int,
    half_width_px: float,
    unit_px: float,
) -> float:
    """Round radius (px) at a top corner; direction +1 = left corner, -1 = right corner."""
    a, b = face.intercept, face.slope
    depth = min(_CORNER_WINDOW * unit_px, 0.5 * top_px)
    reach = max(1.0, min(half_width_px, depth))
    rows = np.arange(run.top, band.top)
    yc = band.top - rows - 0.5
    rows, yc = rows[yc >= top_px - depth], yc[yc >= top_px - depth]
    face_top = a + b * top_px
    if direction > 0:
        c_lo, c_hi = math.floor(face_top - 2.0), math.ceil(face_top + reach)
    else:
        c_lo, c_hi = math.floor(face_top - reach), math.ceil(face_top + 2.0)
    cols = np.arange(max(0, c_lo), min(fg.shape[1], c_hi))
    if rows.size == 0 or cols.size == 0:
        return 0.0

    patch = fg[np.ix_(rows, cols)]
    # Background behind the first material pixel of a row (a core slot) counts as material.
    seen = np.cumsum(patch[:, ::direction], axis=1)[:, ::direction] > 0
    observed = patch | seen

    X = (cols + 0.5)[None, None, :]
    Y = yc[None, :, None]
    radii = np.arange(0.0, min(depth, half_width_px + 1.0) + 1e-9, RADIUS_STEP_PX)
    r = radii[:, None, None]
    cy = top_px - r
    cx = a + b * cy + direction * r * math.sqrt(1.0 + b * b)
    material = direction * (X - (a + b * Y)) >= 0
    removed = (Y >= cy) & (direction * (X - cx) <= 0) & ((X - cx) ** 2 + (Y - cy) ** 2 > r**2)
    predicted = material & ~removed
    mismatches = (predicted != observed[None]).sum(axis=(1, 2))
    return _best_radius(radii, mismatches)


def _base_fillet(
    fg: np.ndarray,
    band: Band,
    run: WallRun,
    face: _FaceFit,
    height_px: float,
    direction: int,
    unit_px: float,
) -> float:
    """Fillet radius (px) at a base junction; direction +1 = left face, -1 = right face."""
    a, b = face.intercept, face.slope
    depth = min(_CORNER_WINDOW * unit_px, 0.5 * height_px)
    rows = np.arange(max(run.top, band.top - math.ceil(depth)), band.top)
    yc = band.top - rows - 0.5
    if direction > 0:
        c_lo, c_hi = math.floor(a - depth - 2.0), math.ceil(a + 2.0)
    else:
        c_lo, c_hi = math.floor(a - 2.0), math.ceil(a + depth + 2.0)
    cols = np.arange(max(0, c_lo), min(fg.shape[1], c_hi))
    if rows.size == 0 or cols.size == 0:
        return 0.0

    # Columns outside the run are background here unless a neighbour reaches in.
    in_run = (cols >= run.c0) & (cols < run.c1)
    observed = fg[np.ix_(rows, cols)] & in_run[None, :]

    X = (cols + 0.5)[None, None, :]
    Y = yc[None, :, None]
    radii = np.arange(0.0, depth + 1e-9, RADIUS_STEP_PX)
    r = radii[:, None, None]
    cy = r
    cx = a + b * cy - direction * r * math.sqrt(1.0 + b * b)
    material = direction * (X - (a + b * Y)) >= 0
    added = ~material & (Y <= cy) & (direction * (X - cx) >= 0) & ((X - cx) ** 2 + (Y - cy) ** 2 > r**2)
    predicted = material | added
    mismatches = (predicted != observed[None]).sum(axis=(1, 2))
    return _best_radius(radii, mismatches)


def _straight_rows(profile: EdgeProfile, height_px: float, base_r: float, top_r: float) -> np.ndarray:
    lo = _TANGENT_FACTOR * base_r + _CORNER_CLEARANCE_PX
    hi = height_px - _TANGENT_FACTOR * top_r - _CORNER_CLEARANCE_PX
    sel = (profile.y >= lo) & (profile.y <= hi)
    if sel.sum() < _MIN_FACE_ROWS:
        sel = profile.window()
    return sel


def _has_core(fg: np.ndarray, band: Band, run: WallRun) -> bool:
    """True when a background region inside the wall outline reaches up from the band."""
    patch = ~fg[run.top:band.top, run.c0:run.c1]
    if patch.size == 0:
        return False
    labels, count = ndimage.label(patch)
    outside = set(np.unique(labels[:, 0])) | set(np.unique(labels[:, -1])) | set(np.unique(labels[0, :]))
    for label in range(1, count + 1):
        if label in outside:
            continue
        rows = np.flatnonzero((labels == label).any(axis=1))
        if rows.size >= 2 and rows[-1] == patch.shape[0] - 1:
            return True
    return False


def _corners(
    fg: np.ndarray,
    band: Band,
    run: WallRun,
    left: _FaceFit,
    right: _FaceFit,
    height_px: float,
    side: Optional[WallSide],
    unit_px: float,
) -> tuple[float, float, float, float]:
    top_width = (right.intercept + right.slope * height_px) - (left.intercept + left.slope * height_px)
    half = max(top_width / 2.0, 1.0)
    top_left = _top_round(fg, band, run, left, height_px, +1, half, unit_px)
    top_right = _top_round(fg, band, run, right, height_px, -1, half, unit_px)
    # The outer face of a side wall runs straight into the end of the band.
    base_left = 0.0 if side is WallSide.LEFT else _base_fillet(fg, band, run, left, height_px, +1, unit_px)
    base_right = 0.0 if side is WallSide.RIGHT else _base_fillet(fg, band, run, right, height_px, -1, unit_px)
    return top_left, top_right, base_left, base_right


def measure_run(
    image: Raster,
    band: Band,
    run: WallRun,
    kind: Optional[WallKind] = None,
    edge_tolerance_px: float = EDGE_TOLERANCE_PX,
) -> WallMeasurement:
    """Measure one wall run; lengths are in bottom-thickness units.

    `edge_tolerance_px` is how far an edge may sit from the ideal pixel-center
    sampling of a straight face; resampled images need more than exact renders.
    """
    unit_px = float(band.thickness)
    upp = 1.0 / unit_px
    if kind is None:
        kind, _ = classify_run(image, band, run)
    side = None
    if kind is WallKind.SIDE:
        side = WallSide.LEFT if run.c0 <= band.x0 + 1 else WallSide.RIGHT

    fg = binary(image)
    profile = edge_profile(image, band, run)
    if profile.y.size == 0:
        raise NoWallFound("wall run has no edge rows")
    height_px = float(run.height(band))

    # First pass on the middle of the wall, second pass between the measured corners.
    middle = profile.window()
    if middle.sum() < _MIN_FACE_ROWS:
        middle = np.ones_like(profile.y, dtype=bool)
    left = _fit_face(profile.y[middle], profile.left[middle], +1.0, edge_tolerance_px)
    right = _fit_face(profile.y[middle], profile.right[middle], -1.0, edge_tolerance_px)
    top_left, top_right, base_left, base_right = _corners(fg, band, run, left, right, height_px, side, unit_px)

    sel_left = _straight_rows(profile, height_px, base_left, top_left)
    sel_right = _straight_rows(profile, height_px, base_right, top_right)
    left = _fit_face(profile.y[sel_left], profile.left[sel_left], +1.0, edge_tolerance_px)
    right = _fit_face(profile.y[sel_right], profile.right[sel_right], -1.0, edge_tolerance_px)
    top_left, top_right, base_left, base_right = _corners(fg, band, run, left, right, height_px, side, unit_px)

    width_top = (right.intercept + right.slope * height_px) - (left.intercept + left.slope * height_px)
    width_base = right.intercept - left.intercept

    inner = ~np.isnan(profile.inner_left[middle])
    cored = _has_core(fg, band, run) and bool(inner.any())
    shell_left = shell_right = 0.0
    if cored:
        shell_left = float(np.median((profile.inner_left[middle] - profile.left[middle])[inner])) * upp
        shell_right = float(np.median((profile.right[middle] - profile.inner_right[middle])[inner])) * upp

    logger.debug(
        "run %d-%d: draft %.2f/%.2f deg, rounds %.1f/%.1f px, fillets %.1f/%.1f px",
        run.c0,
        run.c1,
        left.draft.estimate_deg,
        right.draft.estimate_deg,
        top_left,
        top_right,
        base_left,
        base_right,
    )
    return WallMeasurement(
        kind=kind,
        side=side,
        box_columns=(run.c0, run.c1),
        width_top=width_top * upp,
        width_base=width_base * upp,
        height=height_px * upp,
        draft_left=left.draft,
        draft_right=right.draft,
        top_round_left=top_left * upp,
        top_round_right=top_right * upp,
        base_fillet_left=base_left * upp,
        base_fillet_right=base_right * upp,
        cored=cored,
        shell_left=shell_left,
        shell_right=shell_right,
        units_per_pixel=upp,
    )


def measure_wall(feature: Raster, scale: UnitScale | None = None, kind: Optional[WallKind] = None) -> WallMeasurement:
    """Measure the (first) wall of a feature raster.

    Lengths are reported in bottom-thickness units, or in the units of
    `scale` when one is given.
    """
    band = find_band(feature)
    runs = wall_runs(feature, band, min_wall_px(band))
    if not runs:
        raise NoWallFound("no wall above the bottom band")
    measurement = measure_run(feature, band, runs[0], kind)
    if scale is None:
        return measurement
    factor = scale.units_per_pixel / measurement.units_per_pixel
    return _rescale(measurement, factor, scale.units_per_pixel)


def _rescale(m: WallMeasurement, factor: float, upp: float) -> WallMeasurement:
    return replace(
        m,
        width_top=m.width_top * factor,
        width_base=m.width_base * factor,
        height=m.height * factor,
        top_round_left=m.top_round_left * factor,
        top_round_right=m.top_round_right * factor,
        base_fillet_left=m.base_fillet_left * factor,
        base_fillet_right=m.base_fillet_right * factor,
        shell_left=m.shell_left * factor,
        shell_right=m.shell_right * factor,
        units_per_pixel=upp,
    )
