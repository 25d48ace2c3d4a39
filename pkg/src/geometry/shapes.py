"""
Physical-unit value types for 2D housing profiles.

All types are frozen dataclasses so designs can be shared across threads
and compared by value.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

PART_UNITS_PER_PIXEL = 10.0 / 256.0
FEATURE_UNITS_PER_PIXEL = 6.6 / 256.0
MAX_WALLS_PER_KIND = 9


class WallKind(str, Enum):
    THIN = "thin"
    THICK = "thick"
    SIDE = "side"

    @property
    def mask_digit(self) -> int:
        """Tens digit of the instance-mask code."""
        return _MASK_DIGITS[self]


_MASK_DIGITS = {WallKind.THIN: 1, WallKind.THICK: 2, WallKind.SIDE: 3}


class DraftDirection(str, Enum):
    INWARD = "inward"
    OUTWARD = "outward"


class WallSide(str, Enum):
    """Which end of the bottom wall a side wall stands on."""

    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class UnitScale:
    units_per_pixel: float

    def __post_init__(self) -> None:
        if not self.units_per_pixel > 0:
            raise ValueError("units_per_pixel must be positive")

    @property
    def pixels_per_unit(self) -> float:
        return 1.0 / self.units_per_pixel

    @classmethod
    def part(cls) -> "UnitScale":
        return cls(PART_UNITS_PER_PIXEL)

    @classmethod
    def feature(cls) -> "UnitScale":
        return cls(FEATURE_UNITS_PER_PIXEL)


@dataclass(frozen=True)
class FrameSpec:
    x_range: tuple[float, float]
    y_range: tuple[float, float]

    def __post_init__(self) -> None:
        if not self.x_range[0] < self.x_range[1] or not self.y_range[0] < self.y_range[1]:
            raise ValueError("frame ranges must be nonempty")

    @property
    def width(self) -> float:
        return self.x_range[1] - self.x_range[0]

    @property
    def height(self) -> float:
        return self.y_range[1] - self.y_range[0]

    @classmethod
    def part(cls) -> "FrameSpec":
        return cls((-5.0, 5.0), (-2.0, 8.0))

    @classmethod
    def feature(cls) -> "FrameSpec":
        # Bottom-wall lower edge sits at y=0, half a unit above the frame bottom.
        return cls((-3.3, 3.3), (-0.5, 6.1))


@dataclass(frozen=True)
class CoreSpec:
    shell_thickness: float
    opening: str = "from_below"

    def __post_init__(self) -> None:
        if not self.shell_thickness > 0:
            raise ValueError("shell_thickness must be positive")


@dataclass(frozen=True)
class Treatment:
    draft_deg: float = 0.0
    draft_direction: DraftDirection = DraftDirection.INWARD
    base_fillet_radius: float = 0.0
    top_round_radius: float = 0.0
    core: Optional[CoreSpec] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.draft_deg <= 5.0:
            raise ValueError("draft_deg must lie in [0, 5]")
        for name in ("base_fillet_radius", "top_round_radius"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def is_sharp(self) -> bool:
        return (
            self.draft_deg == 0.0
            and self.base_fillet_radius == 0.0
            and self.top_round_radius == 0.0
            and self.core is None
        )


@dataclass(frozen=True)
class WallSpec:
    kind: WallKind
    center_x: float
    top_width: float
    height: float
    treatment: Treatment = field(default_factory=Treatment)
    side: Optional[WallSide] = None

    def __post_init__(self) -> None:
        if not self.top_width > 0:
            raise ValueError("top_width must be positive")
        if not self.height > 0:
            raise ValueError("height must be positive")
        if self.treatment.core is not None and self.kind is not WallKind.THICK:
            raise ValueError("only thick walls can be cored")
        if self.kind is WallKind.SIDE and self.side is None:
            raise ValueError("side walls need a side (left or right)")

    @property
    def left(self) -> float:
        return self.center_x - self.top_width / 2.0

    @property
    def right(self) -> float:
        return self.center_x + self.top_width / 2.0

    @property
    def outer_x(self) -> float:
        """Outer top edge of a side wall (flush with the bottom-wall end)."""
        return self.left if self.side is WallSide.LEFT else self.right

    def evolve(self, **changes) -> "WallSpec":
        return replace(self, **changes)

    def with_treatment(self, **changes) -> "WallSpec":
        return replace(self, treatment=replace(self.treatment, **changes))


@dataclass(frozen=True)
class PartDesign:
    bottom_thickness: float
    bottom_span: tuple[float, float]
    walls: tuple[WallSpec, ...] = ()
    frame: FrameSpec = field(default_factory=FrameSpec.part)
    bottom_y: float = -1.0

    def __post_init__(self) -> None:
        if not self.bottom_thickness > 0:
            raise ValueError("bottom_thickness must be positive")
        if not self.bottom_span[0] < self.bottom_span[1]:
            raise ValueError("bottom_span must be increasing")
        object.__setattr__(self, "walls", tuple(self.walls))

    @property
    def top_y(self) -> float:
        """Top surface of the bottom wall; wall heights are measured from here."""
        return self.bottom_y + self.bottom_thickness

    def kind_counts(self) -> dict[WallKind, int]:
        counts = {kind: 0 for kind in WallKind}
        for wall in self.walls:
            counts[wall.kind] += 1
        return counts

    def mirrored(self) -> "PartDesign":
        """Mirror about x=0 (frames are symmetric about the origin)."""
        flipped = []
        for wall in reversed(self.walls):
            side = None
            if wall.side is not None:
                side = WallSide.RIGHT if wall.side is WallSide.LEFT else WallSide.LEFT
            flipped.append(replace(wall, center_x=-wall.center_x, side=side))
        return replace(
            self,
            bottom_span=(-self.bottom_span[1], -self.bottom_span[0]),
            walls=tuple(flipped),
            frame=replace(self.frame, x_range=(-self.frame.x_range[1], -self.frame.x_range[0])),
        )
