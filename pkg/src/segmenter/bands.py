"""
Bottom-band and wall-run extraction from binary part images.

The bottom wall is found by scanning up from the lowest foreground row
until the row population drops: above the band the gaps between walls
open up, while inside the band only core slots interrupt it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import EmptyImage, NoBottomWall
from ..geometry.shapes import UnitScale
from ..raster.render import Raster

FOREGROUND_THRESHOLD = 128
_DROP_TOLERANCE_PX = 3
_MIN_BAND_ROWS = 2
MIN_WALL_UNITS = 0.25


@dataclass(frozen=True)
class Band:
    top: int  # first band row (inclusive)
    bottom: int  # last band row (inclusive)
    x0: int  # first band column (inclusive)
    x1: int  # last band column + 1

    @property
    def thickness(self) -> int:
        return self.bottom - self.top + 1

    @property
    def width(self) -> int:
        return self.x1 - self.x0


@dataclass(frozen=True)
class WallRun:
    """Columns [c0, c1) holding foreground above the band; rows [top, band.top)."""

    c0: int
    c1: int
    top: int

    def height(self, band: Band) -> int:
        return band.top - self.top


@dataclass(frozen=True)
class EdgeProfile:
    """Per-row wall edges in continuous pixel coordinates (row centers, x positions)."""

    rows: np.ndarray  # row indices, top to bottom
    y: np.ndarray  # height above the band top in px, at row centers
    left: np.ndarray  # x of the left face (first fg column)
    right: np.ndarray  # x of the right face (last fg column + 1)
    inner_left: np.ndarray  # slot left face or NaN
    inner_right: np.ndarray  # slot right face or NaN

    def window(self, lo_frac: float = 0.2, hi_frac: float = 0.8, height: Optional[float] = None) -> np.ndarray:
        height = float(self.y.max() + 0.5) if height is None else height
        return (self.y >= lo_frac * height) & (self.y <= hi_frac * height)


def binary(image: Raster) -> np.ndarray:
    return np.asarray(image) >= FOREGROUND_THRESHOLD


def find_band(image: Raster) -> Band:
    """Locate the bottom wall; raises EmptyImage / NoBottomWall."""
    fg = binary(image)
    counts = fg.sum(axis=1)
    occupied = np.flatnonzero(counts)
    if occupied.size == 0:
        raise EmptyImage("image has no foreground pixels")

    bottom = int(occupied[-1])
    top = bottom
    while top - 1 >= 0 and counts[top - 1] > 0 and counts[top - 1] >= counts[top] - _DROP_TOLERANCE_PX:
        top -= 1

    band_rows = fg[top:bottom + 1]
    cols = np.flatnonzero(band_rows.any(axis=0))
    band = Band(top, bottom, int(cols[0]), int(cols[-1]) + 1)
    # A block that stops at a population drop has walls standing on it, so
    # a narrow side-wall crop still counts; a block with nothing above it
    # must at least look like a plate.
    walls_above = top > int(occupied[0])
    min_width = band.thickness / 2 if walls_above else 2 * band.thickness
    if band.thickness < _MIN_BAND_ROWS or band.width < min_width:
        raise NoBottomWall(
            f"no horizontal bottom band (lowest block is {band.width}x{band.thickness} px)"
        )
    return band


def estimate_unit_scale(image: Raster) -> UnitScale:
    """One unit = the bottom-wall thickness."""
    return UnitScale(1.0 / find_band(image).thickness)


def min_wall_px(band: Band) -> int:
    """Shortest run (px) counted as a wall; shorter slivers are neighbour fillets or noise."""
    return max(1, int(np.ceil(MIN_WALL_UNITS * band.thickness)))


def wall_runs(image: Raster, band: Band, min_height_px: int = 1) -> list[WallRun]:
    """Maximal column runs with foreground above the band, left to right."""
    fg = binary(image)[: band.top]
    if fg.size == 0:
        return []
    cols = fg.any(axis=0)
    runs: list[WallRun] = []
    c = 0
    width = cols.size
    while c < width:
        if not cols[c]:
            c += 1
            continue
        start = c
        while c < width and cols[c]:
            c += 1
        rows = np.flatnonzero(fg[:, start:c].any(axis=1))
        run = WallRun(start, c, int(rows[0]))
        if run.height(band) >= min_height_px:
            runs.append(run)
    return runs


def edge_profile(image: Raster, band: Band, run: WallRun) -> EdgeProfile:
    fg = binary(image)
    rows = np.arange(run.top, band.top)
    left = np.full(rows.size, np.nan)
    right = np.full(rows.size, np.nan)
    inner_left = np.full(rows.size, np.nan)
    inner_right = np.full(rows.size, np.nan)
    for i, r in enumerate(rows):
        cols = np.flatnonzero(fg[r, run.c0:run.c1]) + run.c0
        if cols.size == 0:
            continue
        left[i] = cols[0]
        right[i] = cols[-1] + 1
        holes = np.flatnonzero(np.diff(cols) > 1)
        if holes.size:
            inner_left[i] = cols[holes[0]] + 1
            inner_right[i] = cols[holes[-1] + 1]
    y = (band.top - rows - 0.5).astype(float)
    keep = ~np.isnan(left)
    return EdgeProfile(rows[keep], y[keep], left[keep], right[keep], inner_left[keep], inner_right[keep])


def fit_line(y: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """Least-squares x = a + b*y; returns (a, b)."""
    if y.size < 2 or np.ptp(y) == 0:
        return (float(np.mean(x)) if x.size else 0.0, 0.0)
    b, a = np.polyfit(y, x, 1)
    return float(a), float(b)


def base_faces(profile: EdgeProfile) -> tuple[float, float]:
    """Face positions extrapolated from the straight middle section down to the band top."""
    sel = profile.window()
    if sel.sum() < 2:
        sel = np.ones_like(profile.y, dtype=bool)
    a_left, _ = fit_line(profile.y[sel], profile.left[sel])
    a_right, _ = fit_line(profile.y[sel], profile.right[sel])
    return a_left, a_right


def median_width(profile: EdgeProfile) -> float:
    """Median row extent (px) over the middle 60 % of the wall height."""
    sel = profile.window()
    widths = (profile.right - profile.left)[sel] if sel.any() else profile.right - profile.left
    return float(np.median(widths))
