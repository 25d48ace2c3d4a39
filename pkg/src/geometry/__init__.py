"""
Physical-unit housing geometry.

Provides the design value types and their realization as line+arc outlines.
"""

from .profile import (
    Arc,
    Polygon,
    fillet_polygon,
    flatten,
    is_simple,
    polygon_area,
    profile_polygon,
    slot_ceiling_width,
    wall_base_extent,
)
from .shapes import (
    FEATURE_UNITS_PER_PIXEL,
    MAX_WALLS_PER_KIND,
    PART_UNITS_PER_PIXEL,
    CoreSpec,
    DraftDirection,
    FrameSpec,
    PartDesign,
    Treatment,
    UnitScale,
    WallKind,
    WallSide,
    WallSpec,
)

__all__ = [
    "Arc",
    "Polygon",
    "fillet_polygon",
    "flatten",
    "is_simple",
    "polygon_area",
    "profile_polygon",
    "slot_ceiling_width",
    "wall_base_extent",
    "FEATURE_UNITS_PER_PIXEL",
    "MAX_WALLS_PER_KIND",
    "PART_UNITS_PER_PIXEL",
    "CoreSpec",
    "DraftDirection",
    "FrameSpec",
    "PartDesign",
    "Treatment",
    "UnitScale",
    "WallKind",
    "WallSide",
    "WallSpec",
]
