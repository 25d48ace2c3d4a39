"""
Seeded synthetic datasets: segmentation examples and translation pairs.
"""

from .generator import (
    DEFAULT_COUNTS,
    Annotation,
    DatasetKind,
    GenConfig,
    WallAnnotation,
    example_seed,
    example_seed_sequence,
    feature_design,
    gen_segmentation_example,
    gen_translation_pair,
    render_feature,
    sample_design,
    sample_example_design,
    verified_walls,
)
from .writer import MANIFEST_NAME, read_manifest, write_dataset

__all__ = [
    "DEFAULT_COUNTS",
    "Annotation",
    "DatasetKind",
    "GenConfig",
    "WallAnnotation",
    "example_seed",
    "example_seed_sequence",
    "feature_design",
    "gen_segmentation_example",
    "gen_translation_pair",
    "render_feature",
    "sample_design",
    "sample_example_design",
    "verified_walls",
    "MANIFEST_NAME",
    "read_manifest",
    "write_dataset",
]
