"""
Manufacturability verification, detection metrics and reference losses.
"""

from .losses import lsgan_d_loss, lsgan_g_loss
from .measure import FaceDraft, WallMeasurement, measure_run, measure_wall
from .metrics import (
    IOU_THRESHOLDS,
    AreaBucket,
    DetectionResult,
    GroundTruth,
    IouType,
    Prediction,
    ap_table,
    average_precision,
    design_precision,
    mean_average_precision,
    pixel_agreement,
)
from .verify import RuleId, Violation, check_measurement, measure_walls, verify

__all__ = [
    "lsgan_d_loss",
    "lsgan_g_loss",
    "FaceDraft",
    "WallMeasurement",
    "measure_run",
    "measure_wall",
    "IOU_THRESHOLDS",
    "AreaBucket",
    "DetectionResult",
    "GroundTruth",
    "IouType",
    "Prediction",
    "ap_table",
    "average_precision",
    "design_precision",
    "mean_average_precision",
    "pixel_agreement",
    "RuleId",
    "Violation",
    "check_measurement",
    "measure_walls",
    "verify",
]
