"""PNG read/write for 8-bit single-channel rasters."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .render import RASTER_SIZE, Raster

SHEET_GAP = 4


def write_png(path: Path | str, raster: Raster) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.ascontiguousarray(raster, dtype=np.uint8)).save(path, format="PNG", optimize=False)
    return path


def read_png(path: Path | str) -> Raster:
    with Image.open(path) as img:
        array = np.asarray(img.convert("L"), dtype=np.uint8).copy()
    if array.shape != (RASTER_SIZE, RASTER_SIZE):
        raise ValueError(f"{path}: expected {RASTER_SIZE}x{RASTER_SIZE}, got {array.shape[1]}x{array.shape[0]}")
    return array


def side_by_side(*rasters: Raster) -> np.ndarray:
    """Horizontal sheet of rasters separated by mid-gray gaps."""
    gap = np.full((RASTER_SIZE, SHEET_GAP), 128, dtype=np.uint8)
    parts: list[np.ndarray] = []
    for i, raster in enumerate(rasters):
        if i:
            parts.append(gap)
        parts.append(raster.astype(np.uint8))
    return np.hstack(parts)


def write_sheet(path: Path | str, *rasters: Raster) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(side_by_side(*rasters)).save(path, format="PNG")
    return path
