"""
Box overlap, duplicate filtering and box expansion for detections.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import Sequence, TypeVar

import numpy as np

from ..raster.frames import PixelBox
from ..raster.render import RASTER_SIZE

logger = logging.getLogger(__name__)

DUPLICATE_IOU = 0.2
BOX_MARGIN_PX = 5

T = TypeVar("T")


def intersection_area(a: PixelBox, b: PixelBox) -> int:
    w = min(a.x1, b.x1) - max(a.x0, b.x0)
    h = min(a.y1, b.y1) - max(a.y0, b.y0)
    return w * h if w > 0 and h > 0 else 0


def iou(a: PixelBox, b: PixelBox) -> float:
    """Intersection over union of two half-open pixel boxes, from integer pixel counts."""
    inter = intersection_area(a, b)
    union = a.area + b.area - inter
    return inter / union


def mask_iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two binary masks (nonzero = member)."""
    ma, mb = np.asarray(a) > 0, np.asarray(b) > 0
    union = int(np.count_nonzero(ma | mb))
    if union == 0:
        return 0.0
    return int(np.count_nonzero(ma & mb)) / union


def expand_box(
    box: PixelBox,
    margin: int = BOX_MARGIN_PX,
    width: int = RASTER_SIZE,
    height: int = RASTER_SIZE,
) -> PixelBox:
    """Grow by `margin` px on every side, clamped to the image."""
    return PixelBox(box.x0 - margin, box.y0 - margin, box.x1 + margin, box.y1 + margin).clamp(width, height)


def filter_duplicates(features: Sequence[T], iou_threshold: float = DUPLICATE_IOU) -> list[T]:
    """Drop the lower-scoring member of every pair whose boxes overlap above the threshold.

    Every pair is considered, including pairs whose members were already
    dropped; on equal scores the earlier-listed feature is kept.
    """
    removed: set[int] = set()
    n = len(features)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = features[i], features[j]
            if iou(a.box, b.box) <= iou_threshold:
                continue
            loser = j if a.score >= b.score else i
            removed.add(loser)
    if removed:
        logger.debug("dropped %d duplicate detections", len(removed))
    return [f for k, f in enumerate(features) if k not in removed]


def perturb_scores(features: Sequence[T], seed: int, spread: float = 0.2) -> list[T]:
    """Seeded score noise in [1 - spread, 1] for exercising filters and AP on imperfect input."""
    rng = np.random.default_rng(seed)
    out = []
    for feature in features:
        score = float(np.clip(1.0 - spread * rng.random(), 0.0, 1.0))
        out.append(replace(feature, score=score))
    return out


def inject_duplicates(features: Sequence[T], seed: int, shift_px: int = 2) -> list[T]:
    """Append a lower-scoring, slightly shifted copy of every feature."""
    rng = np.random.default_rng(seed)
    out = list(features)
    for feature in features:
        dx, dy = (int(v) for v in rng.integers(-shift_px, shift_px + 1, size=2))
        b = feature.box
        box = PixelBox(b.x0 + dx, b.y0 + dy, b.x1 + dx, b.y1 + dy).clamp()
        out.append(replace(feature, box=box, score=feature.score * float(rng.uniform(0.3, 0.9))))
    return out
