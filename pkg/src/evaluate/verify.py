"""
Rule verifier for housing rasters.

Handles:
- Per-wall measurement of every wall standing on the bottom band
- Checking each measurement against the design rules, with tolerances
  no tighter than what pixel quantization can resolve
- Reporting violations in wall order
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..raster.render import Raster
from ..rules.engine import RuleBounds
from ..segmenter.bands import find_band, min_wall_px, wall_runs
from ..geometry.shapes import WallKind, WallSide
from .measure import WallMeasurement, measure_run

logger = logging.getLogger(__name__)

DRAFT_TOLERANCE_DEG = 0.25
HEIGHT_SLACK_PX = 2
MIN_ROUND = 0.3
MAX_ROUND = 0.7
RADIUS_SLACK_PX = 2.0  # line-position error carried into the fitted corner


class RuleId(str, Enum):
    ASPECT_RATIO = "AspectRatio"
    THIN_WIDTH = "ThinWidth"
    SIDE_WIDTH = "SideWidth"
    THICK_SHELL = "ThickShell"
    DRAFT_ANGLE = "DraftAngle"
    CORNER_ROUND = "CornerRound"


@dataclass(frozen=True)
class Violation:
    rule_id: RuleId
    wall_index: int
    measured: float
    allowed: tuple[float, float]
    detail: str = ""

    def to_record(self) -> dict:
        return {
            "rule_id": self.rule_id.value,
            "wall_index": self.wall_index,
            "measured": round(self.measured, 4),
            "allowed": [round(self.allowed[0], 4), round(self.allowed[1], 4)],
            "detail": self.detail,
        }


def _range_check(
    out: list[Violation],
    rule: RuleId,
    index: int,
    value: float,
    lo: float,
    hi: float,
    detail: str = "",
) -> None:
    if not lo <= value <= hi:
        out.append(Violation(rule, index, value, (lo, hi), detail))


def _slack(length: float, px: float) -> float:
    """One pixel on the edges plus one band row of unit-scale uncertainty."""
    return px * (1.0 + length)


def check_measurement(
    m: WallMeasurement,
    index: int = 0,
    bounds: Optional[RuleBounds] = None,
) -> list[Violation]:
    """Violations of one measured wall."""
    bounds = bounds or RuleBounds()
    px = m.units_per_pixel
    found: list[Violation] = []

    if m.kind is not WallKind.SIDE:
        # The unit itself is one band row uncertain, which scales the whole limit.
        limit = bounds.aspect_max * (1.0 + px) + HEIGHT_SLACK_PX * px
        _range_check(found, RuleId.ASPECT_RATIO, index, m.height, 0.0, limit)

    if m.kind is WallKind.THIN:
        lo, hi = bounds.width_range
        _range_check(found, RuleId.THIN_WIDTH, index, m.width_top, lo - _slack(lo, px), hi + _slack(hi, px))
    elif m.kind is WallKind.SIDE:
        w = bounds.side_width
        _range_check(found, RuleId.SIDE_WIDTH, index, m.width_top, w - _slack(w, px), w + _slack(w, px))
    else:
        lo, hi = bounds.width_range
        if not m.cored:
            found.append(Violation(RuleId.THICK_SHELL, index, m.width_top, (lo, hi), "not cored"))
        else:
            _range_check(found, RuleId.THICK_SHELL, index, m.shell_left, lo - _slack(lo, px), hi + _slack(hi, px), "left rib")
            _range_check(found, RuleId.THICK_SHELL, index, m.shell_right, lo - _slack(lo, px), hi + _slack(hi, px), "right rib")

    faces = [("left face", m.draft_left), ("right face", m.draft_right)]
    target = bounds.draft_internal
    if m.kind is WallKind.SIDE:
        target = bounds.draft_side
        faces = [faces[0]] if m.side is WallSide.LEFT else [faces[1]]
    for name, face in faces:
        if not face.admits(target, DRAFT_TOLERANCE_DEG):
            spread = max(DRAFT_TOLERANCE_DEG, face.half_width_deg)
            found.append(Violation(RuleId.DRAFT_ANGLE, index, face.estimate_deg, (target - spread, target + spread), name))

    slack = RADIUS_SLACK_PX * px
    lo, hi = MIN_ROUND - slack, MAX_ROUND + slack
    # Narrow tops end in a full round of half the width.
    top_lo = min(MIN_ROUND, m.width_top / 2.0) - slack
    _range_check(found, RuleId.CORNER_ROUND, index, m.top_round_left, top_lo, hi, "top left")
    _range_check(found, RuleId.CORNER_ROUND, index, m.top_round_right, top_lo, hi, "top right")
    if m.side is not WallSide.LEFT:
        _range_check(found, RuleId.CORNER_ROUND, index, m.base_fillet_left, lo, hi, "base left")
    if m.side is not WallSide.RIGHT:
        _range_check(found, RuleId.CORNER_ROUND, index, m.base_fillet_right, lo, hi, "base right")
    return found


def measure_walls(image: Raster) -> list[WallMeasurement]:
    """Measurements of every wall on the bottom band, left to right."""
    band = find_band(image)
    return [measure_run(image, band, run) for run in wall_runs(image, band, min_wall_px(band))]


def verify(image: Raster, bounds: Optional[RuleBounds] = None) -> list[Violation]:
    """All rule violations in a part or feature image, ordered by wall index."""
    violations: list[Violation] = []
    for index, measurement in enumerate(measure_walls(image)):
        violations.extend(check_measurement(measurement, index, bounds))
    logger.debug("verify: %d violation(s)", len(violations))
    return violations
