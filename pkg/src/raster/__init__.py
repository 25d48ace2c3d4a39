"""
Raster conversion between physical designs and 256x256 images.
"""

from .frames import (
    CropTransform,
    PasteResult,
    PixelBox,
    crop_to_feature_frame,
    paste_from_feature_frame,
)
from .io import read_png, side_by_side, write_png, write_sheet
from .render import (
    BACKGROUND,
    FOREGROUND,
    RASTER_SIZE,
    MaskStyle,
    Raster,
    blank_raster,
    instance_codes,
    pixel_centers,
    rasterize,
    render_mask,
    visualize_mask,
)

__all__ = [
    "CropTransform",
    "PasteResult",
    "PixelBox",
    "crop_to_feature_frame",
    "paste_from_feature_frame",
    "read_png",
    "side_by_side",
    "write_png",
    "write_sheet",
    "BACKGROUND",
    "FOREGROUND",
    "RASTER_SIZE",
    "MaskStyle",
    "Raster",
    "blank_raster",
    "instance_codes",
    "pixel_centers",
    "rasterize",
    "render_mask",
    "visualize_mask",
]
