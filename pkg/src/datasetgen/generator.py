"""
Seeded procedural generation of housing designs and dataset examples.

Handles:
- Rejection sampling of wall layouts on the bottom span
- Per-wall mixing of sharp (unmanufacturable) and rule-treated walls
- Segmentation examples (image, instance mask, annotation)
- Single-wall translation pairs in the feature frame
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import GeometryError, PlacementFailure
from ..evaluate.verify import check_measurement, measure_walls
from ..geometry.profile import profile_polygon
from ..geometry.shapes import FrameSpec, PartDesign, UnitScale, WallKind, WallSide, WallSpec
from ..raster.frames import PixelBox
from ..raster.render import MaskStyle, Raster, instance_codes, rasterize, render_mask
from ..rules.engine import RulePolicy, is_compliant, make_manufacturable

logger = logging.getLogger(__name__)

BOTTOM_SPAN = (-4.8, 4.8)
MAX_ATTEMPTS = 1000
MAX_RESEEDS = 10

THIN_WIDTH = (0.2, 1.0)
THICK_WIDTH = (1.2, 3.0)
SIDE_WIDTH = (0.3, 1.6)
# Kept below 4.8 units so a wall plus its bottom fits the 6.6-unit feature frame.
WALL_HEIGHT = (2.5, 4.8)
MIN_GAP = 0.8
FILLET_GAP = 1.3  # bottom thicknesses between manufacturable envelopes
TOP_CLEARANCE = 0.2

# Translation pairs: bottom margin on each side of the wall, in units.
PAIR_MARGIN = (0.65, 2.0)
PAIR_HALF_SPAN_MAX = 3.1


class DatasetKind(str, Enum):
    SEGMENTATION = "segmentation"
    TRANSLATION = "translation"


DEFAULT_COUNTS = {DatasetKind.SEGMENTATION: 5000, DatasetKind.TRANSLATION: 4000}


@dataclass(frozen=True)
class GenConfig:
    master_seed: int
    n_examples: int = DEFAULT_COUNTS[DatasetKind.SEGMENTATION]
    walls_per_part: int = 3
    mask_style: MaskStyle = MaskStyle.LONG
    manufacturable_fraction: float = 0.0
    scale_jitter: Optional[tuple[float, float]] = None
    policy: RulePolicy = field(default_factory=RulePolicy)

    def __post_init__(self) -> None:
        if self.n_examples <= 0:
            raise ValueError("n_examples must be positive")
        if self.walls_per_part not in (3, 5):
            raise ValueError("walls_per_part must be 3 or 5")
        if not 0.0 <= self.manufacturable_fraction <= 1.0:
            raise ValueError("manufacturable_fraction must lie in [0, 1]")
        if self.scale_jitter is not None:
            lo, hi = self.scale_jitter
            if not 0.5 <= lo <= hi <= 2.0:
                raise ValueError("scale_jitter must be a range inside [0.5, 2.0]")


@dataclass(frozen=True)
class WallAnnotation:
    kind: WallKind
    code: int
    box: PixelBox
    manufacturable: bool
    spec: WallSpec


@dataclass(frozen=True)
class Annotation:
    walls: tuple[WallAnnotation, ...]
    bottom_thickness: float


def example_seed_sequence(master_seed: int, index: int, reseed: int = 0) -> np.random.SeedSequence:
    """Seed stream of example `index`, independent of generation order."""
    entropy = [master_seed & 0xFFFFFFFFFFFFFFFF, index]
    if reseed:
        entropy.append(reseed)
    return np.random.SeedSequence(entropy)


def example_seed(master_seed: int, index: int) -> int:
    return int(example_seed_sequence(master_seed, index).generate_state(1, np.uint64)[0])


def _envelope(kind: WallKind, width: float, height: float, bottom: float, policy: RulePolicy) -> float:
    """Widest base footprint the wall can have once the rules are applied."""
    b = policy.bounds
    if kind is WallKind.SIDE:
        return max(width, b.side_width * bottom)
    run = 2.0 * min(height, b.aspect_max * bottom) * math.tan(math.radians(b.draft_internal))
    if kind is WallKind.THIN:
        return max(width, b.width_range[1] * bottom) + run
    return width + run


def _draw_wall(rng: np.random.Generator, kind: WallKind, bottom: float, room: float) -> tuple[float, float]:
    lo, hi = {WallKind.THIN: THIN_WIDTH, WallKind.THICK: THICK_WIDTH, WallKind.SIDE: SIDE_WIDTH}[kind]
    width = float(rng.uniform(lo, hi)) * bottom
    height = min(float(rng.uniform(*WALL_HEIGHT)) * bottom, room)
    return width, height


def _try_layout(rng: np.random.Generator, config: GenConfig) -> Optional[PartDesign]:
    bottom = float(rng.uniform(*config.scale_jitter)) if config.scale_jitter else 1.0
    frame = FrameSpec.part()
    bottom_y = -1.0
    room = frame.y_range[1] - (bottom_y + bottom) - TOP_CLEARANCE
    policy = config.policy

    interior = [WallKind.THIN if rng.random() < 0.5 else WallKind.THICK for _ in range(config.walls_per_part - 2)]
    kinds = [WallKind.SIDE, *interior, WallKind.SIDE]
    dims = [_draw_wall(rng, kind, bottom, room) for kind in kinds]
    envelopes = [_envelope(kind, w, h, bottom, policy) for kind, (w, h) in zip(kinds, dims)]

    span_lo, span_hi = BOTTOM_SPAN
    gap = max(MIN_GAP, FILLET_GAP * bottom)
    slack = (span_hi - span_lo) - sum(envelopes) - gap * (len(kinds) - 1)
    if slack < 0:
        return None
    gaps = gap + slack * rng.dirichlet(np.ones(len(kinds) - 1))

    walls: list[WallSpec] = []
    cursor = span_lo
    for i, (kind, (width, height), env) in enumerate(zip(kinds, dims, envelopes)):
        if i == 0:
            wall = WallSpec(kind, span_lo + width / 2.0, width, height, side=WallSide.LEFT)
        elif i == len(kinds) - 1:
            wall = WallSpec(kind, span_hi - width / 2.0, width, height, side=WallSide.RIGHT)
        else:
            wall = WallSpec(kind, cursor + env / 2.0, width, height)
        if rng.random() < config.manufacturable_fraction:
            wall = make_manufacturable(wall, bottom, policy)
        walls.append(wall)
        cursor += env + (gaps[i] if i < len(gaps) else 0.0)

    design = PartDesign(bottom, BOTTOM_SPAN, tuple(walls), frame, bottom_y)
    try:
        profile_polygon(design)
    except GeometryError as exc:
        logger.debug("rejected layout: %s", exc)
        return None
    return design


def verified_walls(image: Raster, design: PartDesign, policy: Optional[RulePolicy] = None) -> Optional[list[bool]]:
    """Per-wall verifier verdict on a rendered design, or None when the walls cannot be told apart."""
    bounds = (policy or RulePolicy()).bounds
    measurements = measure_walls(image)
    if len(measurements) != len(design.walls):
        return None
    return [not check_measurement(m, i, bounds) for i, m in enumerate(measurements)]


def _flags_agree(design: PartDesign, policy: RulePolicy) -> bool:
    verdicts = verified_walls(rasterize(design), design, policy)
    expected = [is_compliant(w, design.bottom_thickness, policy) for w in design.walls]
    if verdicts != expected:
        logger.debug("rejected layout: verifier verdicts %s, rule verdicts %s", verdicts, expected)
        return False
    return True


def sample_design(rng: np.random.Generator, config: GenConfig) -> PartDesign:
    """Rejection-sample one design; raises PlacementFailure after MAX_ATTEMPTS draws.

    Layouts whose rendered walls the verifier judges differently from the
    rules are redrawn, so the manufacturable flag of every wall is the
    verifier's.
    """
    for _ in range(MAX_ATTEMPTS):
        design = _try_layout(rng, config)
        if design is not None and _flags_agree(design, config.policy):
            return design
    raise PlacementFailure(f"no valid {config.walls_per_part}-wall layout in {MAX_ATTEMPTS} attempts")


def sample_example_design(config: GenConfig, index: int) -> PartDesign:
    """Design of example `index`, re-seeding the example's sub-stream on placement failure."""
    last: Optional[PlacementFailure] = None
    for reseed in range(MAX_RESEEDS + 1):
        rng = np.random.default_rng(example_seed_sequence(config.master_seed, index, reseed))
        try:
            return sample_design(rng, config)
        except PlacementFailure as exc:
            logger.warning("example %d: %s; re-seeding", index, exc)
            last = exc
    raise last  # type: ignore[misc]


def gen_segmentation_example(
    design: PartDesign,
    style: MaskStyle = MaskStyle.LONG,
    policy: Optional[RulePolicy] = None,
) -> tuple[Raster, Raster, Annotation]:
    """Part image, instance mask and per-wall annotation of one design."""
    image = rasterize(design)
    mask = render_mask(design, style)
    verdicts = verified_walls(image, design, policy)
    if verdicts is None:
        raise GeometryError("rendered walls do not match the design")
    records = []
    for wall, code, clean in zip(design.walls, instance_codes(design), verdicts):
        box = PixelBox.tight(mask == code)
        if box is None:
            raise GeometryError(f"wall with code {code} has no pixels")
        records.append(
            WallAnnotation(
                kind=wall.kind,
                code=code,
                box=box,
                manufacturable=clean,
                spec=wall,
            )
        )
    return image, mask, Annotation(tuple(records), design.bottom_thickness)


def _pair_wall(rng: np.random.Generator, kind: WallKind) -> tuple[WallSpec, tuple[float, float]]:
    width, height = _draw_wall(rng, kind, 1.0, WALL_HEIGHT[1])
    env = _envelope(kind, width, height, 1.0, RulePolicy())
    if kind is not WallKind.SIDE:
        half = min(PAIR_HALF_SPAN_MAX, env / 2.0 + float(rng.uniform(*PAIR_MARGIN)))
        return WallSpec(kind, 0.0, width, height), (-half, half)

    half = min(PAIR_HALF_SPAN_MAX, (env + float(rng.uniform(*PAIR_MARGIN))) / 2.0)
    if rng.random() < 0.5:
        return WallSpec(kind, -half + width / 2.0, width, height, side=WallSide.LEFT), (-half, half)
    return WallSpec(kind, half - width / 2.0, width, height, side=WallSide.RIGHT), (-half, half)


def feature_design(wall: WallSpec, span: tuple[float, float], bottom: float = 1.0) -> PartDesign:
    """Single-wall design placed in the feature frame (bottom lower edge at y=0)."""
    return PartDesign(bottom, span, (wall,), FrameSpec.feature(), 0.0)


def render_feature(design: PartDesign) -> Raster:
    return rasterize(design, FrameSpec.feature(), UnitScale.feature())


def gen_translation_pair(kind: WallKind, rng: np.random.Generator, config: GenConfig) -> tuple[Raster, Raster]:
    """Feature-frame (input, label) pair; manufacturable inputs are their own label."""
    wall, span = _pair_wall(rng, kind)
    policy = config.policy
    if rng.random() < config.manufacturable_fraction:
        treated = feature_design(make_manufacturable(wall, 1.0, policy), span)
        image = render_feature(treated)
        return image, image.copy()
    source = render_feature(feature_design(wall, span))
    label = render_feature(feature_design(make_manufacturable(wall, 1.0, policy), span))
    return source, label
