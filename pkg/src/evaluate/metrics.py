"""
Detection metrics: per-design precision at an IOU threshold, averaged
over designs, plus the mean over thresholds 0.50..0.95 and area buckets.

Predictions are matched greedily in descending score order to the
unconsumed same-kind ground truth of highest overlap; a match below the
threshold still consumes its ground truth and counts as a false positive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..errors import EmptyGroundTruth, ShapeMismatch
from ..geometry.shapes import WallKind
from ..raster.frames import PixelBox
from ..segmenter.boxes import iou, mask_iou

logger = logging.getLogger(__name__)

IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
SMALL_AREA = 32 ** 2
LARGE_AREA = 96 ** 2


class IouType(str, Enum):
    BBOX = "bbox"
    SEGM = "segm"


class AreaBucket(str, Enum):
    ALL = "all"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"

    def contains(self, area: float) -> bool:
        if self is AreaBucket.SMALL:
            return area < SMALL_AREA
        if self is AreaBucket.MEDIUM:
            return SMALL_AREA <= area <= LARGE_AREA
        if self is AreaBucket.LARGE:
            return area > LARGE_AREA
        return True


@dataclass(frozen=True)
class Prediction:
    box: PixelBox
    kind: WallKind
    score: float = 1.0
    mask: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("score must lie in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    box: PixelBox
    kind: WallKind
    mask: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @property
    def area(self) -> int:
        if self.mask is not None:
            return int(np.count_nonzero(self.mask))
        return self.box.area


@dataclass(frozen=True)
class DetectionResult:
    """Predictions and ground truth for one design."""

    predictions: tuple[Prediction, ...]
    ground_truth: tuple[GroundTruth, ...]

    @classmethod
    def of(cls, predictions: Iterable[Prediction], ground_truth: Iterable[GroundTruth]) -> "DetectionResult":
        return cls(tuple(predictions), tuple(ground_truth))


def _overlap(pred: Prediction, gt: GroundTruth, iou_type: IouType) -> float:
    if iou_type is IouType.SEGM:
        if pred.mask is None or gt.mask is None:
            raise ValueError("segm IOU needs masks on predictions and ground truth")
        return mask_iou(pred.mask, gt.mask)
    return iou(pred.box, gt.box)


def design_precision(
    result: DetectionResult,
    iou_threshold: float,
    iou_type: IouType = IouType.BBOX,
    bucket: AreaBucket = AreaBucket.ALL,
) -> Optional[float]:
    """TP / (TP + FP) for one design; None when the bucket holds no ground truth."""
    in_bucket = [bucket.contains(gt.area) for gt in result.ground_truth]
    if not any(in_bucket):
        return None

    order = sorted(range(len(result.predictions)), key=lambda i: -result.predictions[i].score)
    consumed: set[int] = set()
    tp = fp = 0
    for i in order:
        pred = result.predictions[i]
        best, best_iou = None, 0.0
        for j, gt in enumerate(result.ground_truth):
            if j in consumed or gt.kind is not pred.kind:
                continue
            value = _overlap(pred, gt, iou_type)
            if value > best_iou:
                best, best_iou = j, value
        if best is not None:
            consumed.add(best)
            if not in_bucket[best]:
                continue
        elif not bucket.contains(pred.box.area):
            continue
        if best is not None and best_iou >= iou_threshold:
            tp += 1
        else:
            fp += 1
    return tp / (tp + fp) if tp + fp else 0.0


def _as_results(results: Union[DetectionResult, Sequence[DetectionResult]]) -> Sequence[DetectionResult]:
    return [results] if isinstance(results, DetectionResult) else results


def average_precision(
    results: Union[DetectionResult, Sequence[DetectionResult]],
    iou_threshold: float,
    iou_type: Union[IouType, str] = IouType.BBOX,
    bucket: AreaBucket = AreaBucket.ALL,
) -> float:
    """Percent precision at one threshold, averaged over designs with ground truth."""
    iou_type = IouType(iou_type)
    precisions = [design_precision(r, iou_threshold, iou_type, bucket) for r in _as_results(results)]
    kept = [p for p in precisions if p is not None]
    if not kept:
        raise EmptyGroundTruth(f"no ground truth in bucket {bucket.value}")
    excluded = len(precisions) - len(kept)
    if excluded and bucket is AreaBucket.ALL:
        logger.warning("excluded %d design(s) with empty ground truth", excluded)
    return 100.0 * float(np.mean(kept))


def mean_average_precision(
    results: Union[DetectionResult, Sequence[DetectionResult]],
    bucket: Union[AreaBucket, str] = AreaBucket.ALL,
    iou_type: Union[IouType, str] = IouType.BBOX,
) -> Optional[float]:
    """Mean AP over thresholds 0.50..0.95; None when the bucket is empty."""
    bucket = AreaBucket(bucket)
    try:
        values = [average_precision(results, t, iou_type, bucket) for t in IOU_THRESHOLDS]
    except EmptyGroundTruth:
        return None
    return float(np.mean(values))


def ap_table(
    results: Union[DetectionResult, Sequence[DetectionResult]],
    iou_type: Union[IouType, str] = IouType.BBOX,
) -> dict[str, Optional[float]]:
    """AP, AP50, AP75 and the three area buckets, absent entries as None."""
    results = _as_results(results)

    def at(threshold: float) -> Optional[float]:
        try:
            return average_precision(results, threshold, iou_type)
        except EmptyGroundTruth:
            return None

    return {
        "AP": mean_average_precision(results, AreaBucket.ALL, iou_type),
        "AP50": at(0.5),
        "AP75": at(0.75),
        "AP_small": mean_average_precision(results, AreaBucket.SMALL, iou_type),
        "AP_medium": mean_average_precision(results, AreaBucket.MEDIUM, iou_type),
        "AP_large": mean_average_precision(results, AreaBucket.LARGE, iou_type),
    }


def pixel_agreement(output: np.ndarray, label: np.ndarray) -> float:
    """Fraction of pixels on the same side of the foreground threshold."""
    output, label = np.asarray(output), np.asarray(label)
    if output.shape != label.shape:
        raise ShapeMismatch(f"{output.shape} vs {label.shape}")
    return float(np.mean((output >= 128) == (label >= 128)))
