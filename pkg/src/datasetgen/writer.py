"""
Dataset directories: PNG pairs plus a JSON manifest.

Segmentation:  images/NNNNNN.png, masks/NNNNNN.png[, masks_vis/NNNNNN.png]
Translation:   input/NNNNNN.png, label/NNNNNN.png
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DatasetWriteError
from ..geometry.shapes import WallKind
from ..models import ExampleRecord, Manifest, WallRecord, WallSpecRecord, dump_json
from ..raster.io import write_png
from ..raster.render import Raster, visualize_mask
from .generator import (
    DatasetKind,
    GenConfig,
    example_seed,
    example_seed_sequence,
    gen_segmentation_example,
    gen_translation_pair,
    sample_example_design,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def _name(index: int) -> str:
    return f"{index:06d}.png"


def _write(root: Path, relative: str, raster: Raster) -> str:
    path = root / relative
    try:
        write_png(path, raster)
    except OSError as exc:
        raise DatasetWriteError(path, str(exc)) from exc
    return relative


def config_record(config: GenConfig) -> dict:
    return {
        "master_seed": config.master_seed,
        "n_examples": config.n_examples,
        "walls_per_part": config.walls_per_part,
        "mask_style": config.mask_style.value,
        "manufacturable_fraction": config.manufacturable_fraction,
        "scale_jitter": list(config.scale_jitter) if config.scale_jitter else None,
        "width_target": config.policy.width_target.kind.value,
        "round_radius_target": config.policy.round_radius_target.kind.value,
    }


def _segmentation_example(root: Path, config: GenConfig, index: int, vis: bool) -> ExampleRecord:
    design = sample_example_design(config, index)
    image, mask, ann = gen_segmentation_example(design, config.mask_style, config.policy)
    files = {
        "image": _write(root, f"images/{_name(index)}", image),
        "mask": _write(root, f"masks/{_name(index)}", mask),
    }
    if vis:
        files["mask_vis"] = _write(root, f"masks_vis/{_name(index)}", visualize_mask(mask))
    walls = [
        WallRecord(
            kind=w.kind.value,
            code=w.code,
            box=list(w.box.as_tuple()),
            manufacturable=w.manufacturable,
            spec=WallSpecRecord.from_spec(w.spec),
        )
        for w in ann.walls
    ]
    return ExampleRecord(
        index=index,
        seed=example_seed(config.master_seed, index),
        files=files,
        bottom_thickness=round(ann.bottom_thickness, 6),
        walls=walls,
    )


def _translation_example(root: Path, config: GenConfig, index: int, kind: WallKind) -> ExampleRecord:
    rng = np.random.default_rng(example_seed_sequence(config.master_seed, index))
    source, label = gen_translation_pair(kind, rng, config)
    files = {
        "input": _write(root, f"input/{_name(index)}", source),
        "label": _write(root, f"label/{_name(index)}", label),
    }
    return ExampleRecord(
        index=index,
        seed=example_seed(config.master_seed, index),
        files=files,
        wall_kind=kind.value,
    )


def write_dataset(
    directory: Path | str,
    config: GenConfig,
    kind: DatasetKind = DatasetKind.SEGMENTATION,
    wall_kind: Optional[WallKind] = None,
    vis: bool = False,
    threads: int = 1,
) -> Manifest:
    """Generate and write a dataset; output is identical for any thread count."""
    root = Path(directory)
    subdirs = ["images", "masks"] + (["masks_vis"] if vis else [])
    if kind is DatasetKind.TRANSLATION:
        if wall_kind is None:
            raise ValueError("translation datasets need a wall kind")
        subdirs = ["input", "label"]
    try:
        for sub in subdirs:
            (root / sub).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DatasetWriteError(root, str(exc)) from exc

    def build(index: int) -> ExampleRecord:
        if kind is DatasetKind.TRANSLATION:
            return _translation_example(root, config, index, wall_kind)
        return _segmentation_example(root, config, index, vis)

    indices = range(config.n_examples)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(build, indices))
    else:
        records = [build(i) for i in indices]

    echo = config_record(config)
    if wall_kind is not None:
        echo["wall_kind"] = wall_kind.value
    manifest = Manifest(kind=kind.value, config=echo, examples=records)
    path = root / MANIFEST_NAME
    try:
        path.write_text(dump_json(manifest), encoding="utf-8")
    except OSError as exc:
        raise DatasetWriteError(path, str(exc)) from exc
    logger.info("wrote %d %s examples to %s", len(records), kind.value, root)
    return manifest


def read_manifest(directory: Path | str) -> Manifest:
    path = Path(directory) / MANIFEST_NAME
    return Manifest.model_validate_json(path.read_text(encoding="utf-8"))
