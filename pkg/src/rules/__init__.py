"""
DFM rule engine for injection-molded housing walls.
"""

from .engine import (
    RuleBounds,
    RulePolicy,
    TargetKind,
    TargetMode,
    add_draft,
    core_thick_wall,
    enforce_aspect_ratio,
    is_compliant,
    make_manufacturable,
    round_corners,
)

__all__ = [
    "RuleBounds",
    "RulePolicy",
    "TargetKind",
    "TargetMode",
    "add_draft",
    "core_thick_wall",
    "enforce_aspect_ratio",
    "is_compliant",
    "make_manufacturable",
    "round_corners",
]
