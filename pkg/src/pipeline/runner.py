"""
End-to-end pipeline: segment, filter, crop, modify, paste back, verify.

Features are modified independently (optionally on a thread pool) and
pasted in left-to-right order, so overlapping boxes resolve the same way
for any thread count.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DfmError, PipelineError
from ..evaluate.verify import Violation, check_measurement, measure_walls
from ..models import FeatureReport, PipelineReport, TransformRecord, ViolationRecord
from ..geometry.shapes import FEATURE_UNITS_PER_PIXEL, UnitScale
from ..raster.frames import CropTransform, PixelBox, crop_to_feature_frame, paste_from_feature_frame
from ..raster.render import RASTER_SIZE, MaskStyle, Raster
from ..rules.engine import RuleBounds, RulePolicy
from ..segmenter.bands import find_band
from ..segmenter.boxes import DUPLICATE_IOU, expand_box, filter_duplicates
from ..segmenter.detect import DetectedFeature, detect_walls
from .backends import ModificationBackend, RuleOracleBackend, check_output

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureJob:
    index: int
    feature: DetectedFeature
    crop: Raster
    transform: CropTransform


def _violation_record(v: Violation) -> ViolationRecord:
    return ViolationRecord(**v.to_record())


def _transform_record(t: CropTransform) -> TransformRecord:
    return TransformRecord(
        source_box=list(t.source_box.as_tuple()),
        scale_factor=round(t.scale_factor, 6),
        dest_offset=[round(t.dest_offset[0], 6), round(t.dest_offset[1], 6)],
    )


def _fit_box(box: PixelBox, feature: DetectedFeature, band_top: int, limit: int) -> PixelBox:
    """Narrow a box wider than `limit` columns to a window centered on its wall.

    Band columns left out keep their input pixels, so the band stays whole.
    """
    if box.width <= limit:
        return box
    cols = np.flatnonzero(feature.mask[:band_top].any(axis=0))
    center = (cols[0] + cols[-1] + 1) / 2.0 if cols.size else (box.x0 + box.x1) / 2.0
    x0 = min(max(int(round(center - limit / 2.0)), box.x0), box.x1 - limit)
    logger.debug("box %s narrowed to %d columns", box.as_tuple(), limit)
    return PixelBox(x0, box.y0, x0 + limit, box.y1)


def prepare_jobs(image: Raster, style: MaskStyle = MaskStyle.LONG) -> list[FeatureJob]:
    """Detect, de-duplicate, expand and crop every wall feature."""
    band = find_band(image)
    scale = UnitScale(1.0 / band.thickness)
    limit = math.floor(RASTER_SIZE * FEATURE_UNITS_PER_PIXEL / scale.units_per_pixel - 1e-6)
    features = filter_duplicates(detect_walls(image, style), DUPLICATE_IOU)
    jobs = []
    for index, feature in enumerate(features):
        box = _fit_box(expand_box(feature.box), feature, band.top, limit)
        try:
            crop, transform = crop_to_feature_frame(image, box, scale)
        except DfmError as exc:
            raise PipelineError(index, str(exc)) from exc
        jobs.append(FeatureJob(index, feature, crop, transform))
    return jobs


def _modify(backend: ModificationBackend, job: FeatureJob) -> Raster:
    try:
        return check_output(backend(job.crop, job.feature.kind))
    except DfmError as exc:
        raise PipelineError(job.index, str(exc)) from exc


def _input_index(columns: tuple[int, int], jobs: list[FeatureJob], fallback: int) -> int:
    """Index of the input wall whose box shares the most columns with an output wall."""
    best, best_overlap = fallback, 0
    for job in jobs:
        box = job.feature.box
        overlap = min(columns[1], box.x1) - max(columns[0], box.x0)
        if overlap > best_overlap:
            best, best_overlap = job.index, overlap
    return best


def _verify_by_input(canvas: Raster, jobs: list[FeatureJob], bounds: Optional[RuleBounds]) -> list[Violation]:
    """Verify the output canvas, numbering walls as they were detected in the input."""
    violations: list[Violation] = []
    for position, measurement in enumerate(measure_walls(canvas)):
        index = _input_index(measurement.box_columns, jobs, position)
        violations.extend(check_measurement(measurement, index, bounds))
    violations.sort(key=lambda v: v.wall_index)
    logger.debug("output verify: %d violation(s)", len(violations))
    return violations


def run(
    image: Raster,
    backend: Optional[ModificationBackend] = None,
    policy: Optional[RulePolicy] = None,
    style: MaskStyle = MaskStyle.LONG,
    threads: int = 1,
    check: bool = True,
) -> tuple[Raster, PipelineReport]:
    """Rewrite every wall of `image` through `backend` (the rule oracle by default)."""
    started = time.perf_counter()
    backend = backend or RuleOracleBackend(policy)
    jobs = prepare_jobs(image, style)

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(lambda job: _modify(backend, job), jobs))
    else:
        outputs = [_modify(backend, job) for job in jobs]

    canvas = image.copy()
    entries = []
    for job, output in zip(jobs, outputs):
        modified = not np.array_equal(output, job.crop)
        overflow = False
        if modified:
            pasted = paste_from_feature_frame(canvas, output, job.transform)
            canvas, overflow = pasted.canvas, pasted.overflow
            if overflow:
                logger.warning("feature %d: modified wall spills past its box", job.index)
        entries.append((job, modified, overflow))

    violations = _verify_by_input(canvas, jobs, policy.bounds if policy else None) if check else []
    features = [
        FeatureReport(
            index=job.index,
            kind=job.feature.kind.value,
            box=list(job.feature.box.as_tuple()),
            transform=_transform_record(job.transform),
            backend=backend.name,
            modified=modified,
            overflow=overflow,
            violations=[_violation_record(v) for v in violations if v.wall_index == job.index],
        )
        for job, modified, overflow in entries
    ]
    report = PipelineReport(
        wall_count=len(jobs),
        features=features,
        violations=[_violation_record(v) for v in violations],
        elapsed_s=round(time.perf_counter() - started, 6),
    )
    logger.info(
        "pipeline: %d wall(s), %d modified, %d violation(s)",
        len(jobs),
        sum(1 for _, modified, _ in entries if modified),
        len(violations),
    )
    return canvas, report
