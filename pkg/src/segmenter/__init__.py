"""
Wall segmentation: classical detector, box overlap and duplicate filtering.
"""

from .bands import Band, EdgeProfile, WallRun, edge_profile, estimate_unit_scale, find_band, min_wall_px, wall_runs
from .boxes import (
    BOX_MARGIN_PX,
    DUPLICATE_IOU,
    expand_box,
    filter_duplicates,
    inject_duplicates,
    iou,
    mask_iou,
    perturb_scores,
)
from .detect import THIN_THICK_THRESHOLD, DetectedFeature, classify_run, detect_walls

__all__ = [
    "Band",
    "EdgeProfile",
    "WallRun",
    "edge_profile",
    "estimate_unit_scale",
    "find_band",
    "min_wall_px",
    "wall_runs",
    "BOX_MARGIN_PX",
    "DUPLICATE_IOU",
    "expand_box",
    "filter_duplicates",
    "inject_duplicates",
    "iou",
    "mask_iou",
    "perturb_scores",
    "THIN_THICK_THRESHOLD",
    "DetectedFeature",
    "classify_run",
    "detect_walls",
]
