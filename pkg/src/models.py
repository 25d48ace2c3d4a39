"""
Pydantic models for every JSON artifact the engine writes.

Dataset manifests, pipeline reports, evaluation and bench reports, and the
optional CLI config file.
"""

import json
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .geometry.shapes import WallSpec


SCHEMA_VERSION = 1


# ============================================================
# Literal Types (Enums)
# ============================================================

WallKindName = Literal["thin", "thick", "side"]
DatasetKindName = Literal["segmentation", "translation"]
MaskStyleName = Literal["long", "short"]
OutputFormat = Literal["json", "text"]
BackendName = Literal["rule", "identity", "external"]
TargetName = Literal["midpoint", "seeded_uniform"]


def dump_json(model: BaseModel) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


# ============================================================
# Dataset Models
# ============================================================

class WallSpecRecord(BaseModel):
    """Ground-truth wall dimensions and treatment."""
    kind: WallKindName
    center_x: float
    top_width: float
    height: float
    side: Optional[Literal["left", "right"]] = None
    draft_deg: float = 0.0
    draft_direction: Literal["inward", "outward"] = "inward"
    base_fillet_radius: float = 0.0
    top_round_radius: float = 0.0
    shell_thickness: Optional[float] = None

    @classmethod
    def from_spec(cls, wall: WallSpec) -> "WallSpecRecord":
        t = wall.treatment
        return cls(
            kind=wall.kind.value,
            center_x=round(wall.center_x, 6),
            top_width=round(wall.top_width, 6),
            height=round(wall.height, 6),
            side=wall.side.value if wall.side else None,
            draft_deg=t.draft_deg,
            draft_direction=t.draft_direction.value,
            base_fillet_radius=round(t.base_fillet_radius, 6),
            top_round_radius=round(t.top_round_radius, 6),
            shell_thickness=round(t.core.shell_thickness, 6) if t.core else None,
        )


class WallRecord(BaseModel):
    """Annotation of one wall in a segmentation example."""
    kind: WallKindName
    code: int
    box: list[int]
    manufacturable: bool
    spec: WallSpecRecord


class ExampleRecord(BaseModel):
    index: int
    seed: int
    files: dict[str, str]
    bottom_thickness: Optional[float] = None
    walls: list[WallRecord] = Field(default_factory=list)
    wall_kind: Optional[WallKindName] = None


class Manifest(BaseModel):
    """Dataset manifest: config echo plus one record per example in index order."""
    schema_version: int = SCHEMA_VERSION
    kind: DatasetKindName
    config: dict[str, Any]
    examples: list[ExampleRecord]


# ============================================================
# Pipeline Models
# ============================================================

class ViolationRecord(BaseModel):
    rule_id: str
    wall_index: int
    measured: float
    allowed: list[float]
    detail: str = ""


class TransformRecord(BaseModel):
    source_box: list[int]
    scale_factor: float
    dest_offset: list[float]


class FeatureReport(BaseModel):
    index: int
    kind: WallKindName
    box: list[int]
    transform: TransformRecord
    backend: str
    modified: bool
    overflow: bool = False
    violations: list[ViolationRecord] = Field(default_factory=list)


class PipelineReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    wall_count: int
    features: list[FeatureReport]
    violations: list[ViolationRecord] = Field(default_factory=list)
    elapsed_s: float = 0.0


# ============================================================
# Evaluation Models
# ============================================================

class ApRow(BaseModel):
    """One AP table row (object detection or segmentation)."""
    iou_type: Literal["bbox", "segm"]
    AP: Optional[float] = None
    AP50: Optional[float] = None
    AP75: Optional[float] = None
    AP_small: Optional[float] = None
    AP_medium: Optional[float] = None
    AP_large: Optional[float] = None


class DesignEvaluation(BaseModel):
    index: int
    detected: int
    expected: int
    kinds_agree: bool
    violations: list[ViolationRecord] = Field(default_factory=list)


class EvaluationReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    designs: list[DesignEvaluation] = Field(default_factory=list)
    ap_table: list[ApRow] = Field(default_factory=list)
    verifier_clean_fraction: Optional[float] = None
    pixel_agreement: dict[str, float] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)


class BenchRow(BaseModel):
    stage: str
    seconds_per_design: float
    baseline_s: Optional[float] = None
    speedup: Optional[float] = None


class BenchReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    designs: int
    walls_per_part: int
    threads: int
    rows: list[BenchRow]


# ============================================================
# CLI Config File
# ============================================================

class CliConfig(BaseModel):
    """Defaults read from --config; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = None
    threads: Optional[int] = Field(default=None, ge=1)
    format: Optional[OutputFormat] = None
    n: Optional[int] = Field(default=None, ge=1)
    walls: Optional[Literal[3, 5]] = None
    mask_style: Optional[MaskStyleName] = None
    manufacturable_fraction: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    scale_jitter: Optional[tuple[float, float]] = None
    width_target: Optional[TargetName] = None
    round_radius_target: Optional[TargetName] = None
    backend: Optional[BackendName] = None
    backend_command: Optional[str] = None
    out: Optional[str] = None
