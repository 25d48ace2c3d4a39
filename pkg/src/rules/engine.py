"""
Injection-molding DFM rules.

Each rule rewrites only the dimensions of a wall that fall outside their
allowed range, so compliant walls pass through unchanged. The rules are
always composed in the same order: aspect ratio, coring, draft, rounds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import NotThick
from ..geometry.shapes import CoreSpec, DraftDirection, WallKind, WallSide, WallSpec

logger = logging.getLogger(__name__)

_TOL = 1e-9
# Smallest slot left open inside a cored wall, relative to the bottom thickness.
_MIN_SLOT = 0.1


class TargetKind(str, Enum):
    MIDPOINT = "midpoint"
    SEEDED_UNIFORM = "seeded_uniform"


@dataclass(frozen=True)
class TargetMode:
    kind: TargetKind = TargetKind.MIDPOINT
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind is TargetKind.SEEDED_UNIFORM and self.seed is None:
            raise ValueError("seeded_uniform targets need a seed")

    @classmethod
    def midpoint(cls) -> "TargetMode":
        return cls()

    @classmethod
    def seeded(cls, seed: int) -> "TargetMode":
        return cls(TargetKind.SEEDED_UNIFORM, seed)

    def pick(self, lo: float, hi: float, key: tuple[int, ...]) -> float:
        """Midpoint, or a reproducible draw strictly inside (lo, hi) keyed by `key`."""
        if self.kind is TargetKind.MIDPOINT:
            return (lo + hi) / 2.0
        rng = np.random.default_rng([int(self.seed) & 0xFFFFFFFF, *key])
        u = float(rng.random())
        return lo + (hi - lo) * (0.001 + 0.998 * u)


@dataclass(frozen=True)
class RuleBounds:
    aspect_max: float = 4.0
    width_range: tuple[float, float] = (0.4, 0.6)
    side_width: float = 1.0
    draft_internal: float = 1.0
    draft_side: float = 1.5
    round_range: tuple[float, float] = (0.4, 0.6)


@dataclass(frozen=True)
class RulePolicy:
    width_target: TargetMode = field(default_factory=TargetMode.midpoint)
    round_radius_target: TargetMode = field(default_factory=TargetMode.midpoint)
    bounds: RuleBounds = field(default_factory=RuleBounds)

    @classmethod
    def seeded(cls, seed: int) -> "RulePolicy":
        return cls(TargetMode.seeded(seed), TargetMode.seeded(seed + 1))


def _wall_key(wall: WallSpec, tag: int) -> tuple[int, ...]:
    return (tag, int(round(wall.center_x * 1e6)) & 0xFFFFFFFF, int(round(wall.height * 1e6)) & 0xFFFFFFFF)


def _inside(value: float, lo: float, hi: float) -> bool:
    return lo - _TOL <= value <= hi + _TOL


def enforce_aspect_ratio(wall: WallSpec, bottom: float, policy: RulePolicy) -> WallSpec:
    """Clamp height to aspect_max x bottom and fix thin/side widths."""
    if bottom <= 0:
        raise ValueError("bottom thickness must be positive")
    b = policy.bounds

    if wall.kind is WallKind.SIDE:
        width = b.side_width * bottom
        if abs(wall.top_width - width) <= _TOL:
            return wall
        # The outer face stays flush with the bottom-wall end.
        outer = wall.outer_x
        center = outer + width / 2.0 if wall.side is WallSide.LEFT else outer - width / 2.0
        return wall.evolve(top_width=width, center_x=center)

    height = min(wall.height, b.aspect_max * bottom)
    width = wall.top_width
    if wall.kind is WallKind.THIN:
        lo, hi = b.width_range[0] * bottom, b.width_range[1] * bottom
        if not _inside(width, lo, hi):
            width = policy.width_target.pick(lo, hi, _wall_key(wall, 1))
    if height == wall.height and width == wall.top_width:
        return wall
    return wall.evolve(height=height, top_width=width)


def core_thick_wall(wall: WallSpec, bottom: float, policy: RulePolicy) -> WallSpec:
    """Hollow a thick wall from below, leaving ribs and cap of uniform shell thickness."""
    if wall.kind is not WallKind.THICK:
        raise NotThick(f"cannot core a {wall.kind.value} wall")
    lo, hi = (r * bottom for r in policy.bounds.width_range)
    core = wall.treatment.core
    if core is not None and _inside(core.shell_thickness, lo, hi):
        return wall

    shell = policy.width_target.pick(lo, hi, _wall_key(wall, 2))
    # Narrow thick walls keep a minimal slot; the shell never drops below lo.
    shell = min(shell, max(lo, (wall.top_width - _MIN_SLOT * bottom) / 2.0))
    return wall.with_treatment(core=CoreSpec(shell_thickness=shell))


def add_draft(wall: WallSpec, policy: RulePolicy) -> WallSpec:
    """Internal walls taper inward at 1 deg; side walls flare their outer face at 1.5 deg."""
    b = policy.bounds
    if wall.kind is WallKind.SIDE:
        target, direction = b.draft_side, DraftDirection.OUTWARD
    else:
        target, direction = b.draft_internal, DraftDirection.INWARD
    t = wall.treatment
    if abs(t.draft_deg - target) <= _TOL and t.draft_direction is direction:
        return wall
    return wall.with_treatment(draft_deg=target, draft_direction=direction)


def round_corners(wall: WallSpec, policy: RulePolicy, bottom: float = 1.0) -> WallSpec:
    """Set base fillet and top round radii inside the allowed range."""
    lo, hi = (r * bottom for r in policy.bounds.round_range)
    t = wall.treatment
    base = t.base_fillet_radius
    top = t.top_round_radius
    if not _inside(base, lo, hi):
        base = policy.round_radius_target.pick(lo, hi, _wall_key(wall, 3))
    if not _inside(top, lo, hi):
        top = policy.round_radius_target.pick(lo, hi, _wall_key(wall, 4))
    if base == t.base_fillet_radius and top == t.top_round_radius:
        return wall
    return wall.with_treatment(base_fillet_radius=base, top_round_radius=top)


def make_manufacturable(wall: WallSpec, bottom: float, policy: RulePolicy | None = None) -> WallSpec:
    """Apply every rule in order: aspect ratio, coring (thick only), draft, rounds."""
    policy = policy or RulePolicy()
    result = enforce_aspect_ratio(wall, bottom, policy)
    if result.kind is WallKind.THICK:
        result = core_thick_wall(result, bottom, policy)
    result = add_draft(result, policy)
    result = round_corners(result, policy, bottom)
    if result != wall:
        logger.debug("rewrote %s wall at x=%.3f", wall.kind.value, wall.center_x)
    return result


def is_compliant(wall: WallSpec, bottom: float, policy: RulePolicy | None = None) -> bool:
    """True when make_manufacturable would leave the wall unchanged."""
    return make_manufacturable(wall, bottom, policy) == wall
