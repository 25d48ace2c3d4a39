"""
Command-line entry point.

Subcommands: gen, segment, modify, pipeline, verify, eval, bench, render.
Exit codes: 0 success, 1 domain error (or violations under --strict),
2 usage / IO / config errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import ValidationError

from .config import get_settings
from .datasetgen import DatasetKind, GenConfig, read_manifest, sample_example_design, write_dataset
from .errors import DfmError
from .evaluate import (
    DetectionResult,
    GroundTruth,
    Prediction,
    ap_table,
    pixel_agreement,
    verify,
)
from .evaluate.measure import EDGE_TOLERANCE_PX
from .evaluate.verify import DRAFT_TOLERANCE_DEG, HEIGHT_SLACK_PX, MAX_ROUND, MIN_ROUND, RADIUS_SLACK_PX
from .export import bench_markdown, evaluation_markdown
from .geometry.shapes import WallKind
from .models import (
    ApRow,
    BenchReport,
    BenchRow,
    CliConfig,
    DesignEvaluation,
    EvaluationReport,
    ViolationRecord,
    dump_json,
)
from .pipeline import RuleOracleBackend, make_backend, run
from .raster.frames import PixelBox
from .raster.io import read_png, write_png, write_sheet
from .raster.render import MaskStyle, rasterize
from .rules.engine import RulePolicy, TargetMode
from .segmenter import detect_walls, filter_duplicates, inject_duplicates, perturb_scores

logger = logging.getLogger(__name__)

# Per-design runtimes of the learned pipeline this engine is compared against.
SEGMENTATION_BASELINE_S = 0.79
TRANSLATION_BASELINE_S = 0.026


class UsageError(Exception):
    """Bad flag combination detected after parsing."""


# ============================================================
# Argument parsing
# ============================================================

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with default option values")
    p.add_argument("--seed", type=int, help="master seed (falls back to DFM_SEED)")
    p.add_argument("--threads", type=int, help="worker threads for corpus-level work")
    p.add_argument("--format", choices=("json", "text"), help="stdout format")


def _add_policy(p: argparse.ArgumentParser) -> None:
    p.add_argument("--width-target", choices=("midpoint", "seeded_uniform"))
    p.add_argument("--round-target", dest="round_radius_target", choices=("midpoint", "seeded_uniform"))


def _add_backend(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=("rule", "identity", "external"))
    p.add_argument("--backend-command", help="external backend command; {input} {output} {kind} are substituted")


def _parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="dfm", description="DFM engine for 2D molded housing profiles")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a dataset")
    _add_common(gen)
    _add_policy(gen)
    gen.add_argument("--kind", choices=("seg", "segmentation", "translation"), default="seg")
    gen.add_argument("--wall-kind", choices=[k.value for k in WallKind])
    gen.add_argument("--n", type=int)
    gen.add_argument("--walls", type=int, choices=(3, 5))
    gen.add_argument("--mask-style", choices=[s.value for s in MaskStyle])
    gen.add_argument("--manufacturable-fraction", type=float)
    gen.add_argument("--scale-jitter", type=float, nargs=2, metavar=("LO", "HI"))
    gen.add_argument("--vis", action="store_true", help="also write x8 mask visualizations")
    gen.add_argument("--out", type=Path)

    seg = sub.add_parser("segment", help="detect wall features in a part image")
    _add_common(seg)
    seg.add_argument("--in", dest="input", type=Path, required=True)
    seg.add_argument("--mask-style", choices=[s.value for s in MaskStyle])
    seg.add_argument("--masks", type=Path, help="directory for per-feature mask PNGs")

    modify = sub.add_parser("modify", help="run a backend on one feature-frame image")
    _add_common(modify)
    _add_policy(modify)
    _add_backend(modify)
    modify.add_argument("--in", dest="input", type=Path, required=True)
    modify.add_argument("--kind", choices=[k.value for k in WallKind], required=True)
    modify.add_argument("--out", type=Path, required=True)

    pipe = sub.add_parser("pipeline", help="segment, modify and reintegrate a part image")
    _add_common(pipe)
    _add_policy(pipe)
    _add_backend(pipe)
    pipe.add_argument("--in", dest="input", type=Path, required=True)
    pipe.add_argument("--out", type=Path)
    pipe.add_argument("--report", type=Path)
    pipe.add_argument("--sheet", type=Path, help="before/after PNG sheet")
    pipe.add_argument("--mask-style", choices=[s.value for s in MaskStyle])

    ver = sub.add_parser("verify", help="check a part or feature image against the rules")
    _add_common(ver)
    ver.add_argument("--in", dest="input", type=Path, required=True)
    ver.add_argument("--strict", action="store_true", help="exit 1 when violations are found")

    ev = sub.add_parser("eval", help="score detection and pipeline output on datasets")
    _add_common(ev)
    _add_policy(ev)
    ev.add_argument("--data", type=Path, help="segmentation dataset directory")
    ev.add_argument("--translation", type=Path, action="append", default=[], help="translation dataset directory")
    ev.add_argument("--limit", type=int, help="evaluate only the first N examples")
    ev.add_argument("--pipeline", action="store_true", help="also run the rule pipeline and verify outputs")
    ev.add_argument("--perturb-seed", type=int, help="perturb scores and inject duplicates before filtering")
    ev.add_argument("--report", type=Path)
    ev.add_argument("--pdf", type=Path)

    bench = sub.add_parser("bench", help="time the pipeline against the learned baselines")
    _add_common(bench)
    bench.add_argument("--n", type=int, help="designs to time (default: config file, then 50)")
    bench.add_argument("--walls", type=int, choices=(3, 5))
    bench.add_argument("--report", type=Path)
    bench.add_argument("--pdf", type=Path)

    render = sub.add_parser("render", help="write a before/after sheet")
    _add_common(render)
    _add_policy(render)
    render.add_argument("--in", dest="input", type=Path, required=True)
    render.add_argument("--after", type=Path, help="already-modified image; default runs the rule pipeline")
    render.add_argument("--out", type=Path, required=True)

    return parser.parse_args(argv)


# ============================================================
# Option resolution: flags > config file > environment
# ============================================================

class Options:
    def __init__(self, args: argparse.Namespace, config: CliConfig) -> None:
        self.args = args
        self.config = config
        self.settings = get_settings()

    def get(self, name: str, default: Any = None) -> Any:
        value = getattr(self.args, name, None)
        if value is not None and value is not False:
            return value
        value = getattr(self.config, name, None)
        return default if value is None else value

    @property
    def seed(self) -> Optional[int]:
        return self.get("seed", self.settings.DFM_SEED)

    def require_seed(self) -> int:
        seed = self.seed
        if seed is None:
            raise UsageError(f"{self.args.command} needs --seed (or DFM_SEED)")
        return seed

    @property
    def threads(self) -> int:
        threads = int(self.get("threads", self.settings.DFM_THREADS))
        if threads < 1:
            raise UsageError("--threads must be positive")
        return threads

    @property
    def output_format(self) -> str:
        return self.get("format", self.settings.DFM_OUTPUT_FORMAT)

    def policy(self) -> RulePolicy:
        def target(name: str) -> TargetMode:
            if self.get(name, "midpoint") == "seeded_uniform":
                return TargetMode.seeded(self.require_seed())
            return TargetMode.midpoint()

        return RulePolicy(width_target=target("width_target"), round_radius_target=target("round_radius_target"))

    def backend(self):
        return make_backend(self.get("backend", "rule"), self.policy(), self.get("backend_command"))

    def mask_style(self) -> MaskStyle:
        return MaskStyle(self.get("mask_style", MaskStyle.LONG.value))


def _load_config(path: Optional[Path]) -> CliConfig:
    if path is None:
        return CliConfig()
    return CliConfig.model_validate_json(path.read_text(encoding="utf-8"))


def _emit(payload: Any, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    if isinstance(payload, dict):
        for key, value in payload.items():
            print(f"{key}: {value}")
    elif isinstance(payload, list):
        for item in payload:
            print(item)
    else:
        print(payload)


# ============================================================
# Commands
# ============================================================

def cmd_gen(opts: Options) -> int:
    seed = opts.require_seed()
    kind = DatasetKind.TRANSLATION if opts.args.kind == "translation" else DatasetKind.SEGMENTATION
    wall_kind = WallKind(opts.args.wall_kind) if opts.args.wall_kind else None
    if kind is DatasetKind.TRANSLATION and wall_kind is None:
        raise UsageError("translation datasets need --wall-kind")
    jitter = opts.get("scale_jitter")
    config = GenConfig(
        master_seed=seed,
        n_examples=opts.get("n", {DatasetKind.SEGMENTATION: 5000, DatasetKind.TRANSLATION: 4000}[kind]),
        walls_per_part=opts.get("walls", 3),
        mask_style=opts.mask_style(),
        manufacturable_fraction=opts.get("manufacturable_fraction", 0.0),
        scale_jitter=tuple(jitter) if jitter else None,
        policy=opts.policy(),
    )
    out = opts.get("out") or Path(opts.settings.DFM_DATA_DIR) / kind.value
    manifest = write_dataset(Path(out), config, kind, wall_kind, vis=opts.args.vis, threads=opts.threads)
    _emit({"dir": str(out), "examples": len(manifest.examples), "kind": kind.value}, opts.output_format)
    return 0


def cmd_segment(opts: Options) -> int:
    image = read_png(opts.args.input)
    features = filter_duplicates(detect_walls(image, opts.mask_style()))
    if opts.args.masks:
        for i, feature in enumerate(features):
            write_png(opts.args.masks / f"feature_{i:02d}_{feature.kind.value}.png", feature.mask)
    _emit([f.to_record() for f in features], opts.output_format)
    return 0


def cmd_modify(opts: Options) -> int:
    feature = read_png(opts.args.input)
    output = opts.backend()(feature, WallKind(opts.args.kind))
    write_png(opts.args.out, output)
    _emit({"out": str(opts.args.out), "modified": bool(not np.array_equal(output, feature))}, opts.output_format)
    return 0


def cmd_pipeline(opts: Options) -> int:
    image = read_png(opts.args.input)
    output, report = run(image, opts.backend(), opts.policy(), opts.mask_style(), opts.threads)
    if opts.args.out:
        write_png(opts.args.out, output)
    if opts.args.sheet:
        write_sheet(opts.args.sheet, image, output)
    if opts.args.report:
        opts.args.report.parent.mkdir(parents=True, exist_ok=True)
        opts.args.report.write_text(dump_json(report), encoding="utf-8")
    _emit(
        {"walls": report.wall_count, "violations": len(report.violations), "elapsed_s": report.elapsed_s},
        opts.output_format,
    )
    return 0


def cmd_verify(opts: Options) -> int:
    violations = verify(read_png(opts.args.input))
    _emit([v.to_record() for v in violations], opts.output_format)
    return 1 if violations and opts.args.strict else 0


def _evaluate_example(root: Path, record, style: MaskStyle, opts: Options, policy: RulePolicy):
    image = read_png(root / record.files["image"])
    mask = read_png(root / record.files["mask"])
    detections = detect_walls(image, style)
    if opts.args.perturb_seed is not None:
        seed = opts.args.perturb_seed + record.index
        detections = inject_duplicates(perturb_scores(detections, seed), seed)
    detections = filter_duplicates(detections)

    predictions = [Prediction(d.box, d.kind, d.score, d.mask) for d in detections]
    truth = [GroundTruth(PixelBox(*w.box), WallKind(w.kind), mask == w.code) for w in record.walls]
    ordered = [p.kind for p in sorted(predictions, key=lambda p: p.box.x0)]
    agree = ordered == [g.kind for g in sorted(truth, key=lambda g: g.box.x0)]

    violations: list[ViolationRecord] = []
    if opts.args.pipeline:
        _, report = run(image, RuleOracleBackend(policy), policy, style)
        violations = report.violations
    evaluation = DesignEvaluation(
        index=record.index,
        detected=len(detections),
        expected=len(record.walls),
        kinds_agree=agree,
        violations=violations,
    )
    return DetectionResult.of(predictions, truth), evaluation


def _translation_agreement(root: Path, opts: Options, policy: RulePolicy) -> tuple[str, float]:
    manifest = read_manifest(root)
    backend = RuleOracleBackend(policy)
    scores = []
    records = manifest.examples[: opts.args.limit] if opts.args.limit else manifest.examples
    for record in records:
        source = read_png(root / record.files["input"])
        label = read_png(root / record.files["label"])
        scores.append(pixel_agreement(backend(source, WallKind(record.wall_kind)), label))
    kind = manifest.config.get("wall_kind", "unknown")
    return kind, float(np.mean(scores)) if scores else 0.0


def cmd_eval(opts: Options) -> int:
    if opts.args.data is None and not opts.args.translation:
        raise UsageError("eval needs --data and/or --translation")
    policy = opts.policy()
    report = EvaluationReport(
        tolerances={
            "draft_deg": DRAFT_TOLERANCE_DEG,
            "edge_px": EDGE_TOLERANCE_PX,
            "height_slack_px": float(HEIGHT_SLACK_PX),
            "length_px": 1.0,
            "scale_rows": 1.0,
            "round_min": MIN_ROUND,
            "round_max": MAX_ROUND,
            "radius_px": RADIUS_SLACK_PX,
        }
    )

    if opts.args.data is not None:
        root = opts.args.data
        manifest = read_manifest(root)
        style = MaskStyle(manifest.config.get("mask_style", MaskStyle.LONG.value))
        records = manifest.examples[: opts.args.limit] if opts.args.limit else manifest.examples

        def evaluate(record):
            return _evaluate_example(root, record, style, opts, policy)

        if opts.threads > 1:
            with ThreadPoolExecutor(max_workers=opts.threads) as pool:
                outcomes = list(pool.map(evaluate, records))
        else:
            outcomes = [evaluate(r) for r in records]
        results = [result for result, _ in outcomes]
        report.designs = [evaluation for _, evaluation in outcomes]
        report.ap_table = [ApRow(iou_type=t, **ap_table(results, t)) for t in ("bbox", "segm")]
        if opts.args.pipeline and report.designs:
            clean = sum(1 for d in report.designs if not d.violations)
            report.verifier_clean_fraction = clean / len(report.designs)

    for root in opts.args.translation:
        kind, agreement = _translation_agreement(root, opts, policy)
        report.pixel_agreement[kind] = agreement

    if opts.args.report:
        opts.args.report.parent.mkdir(parents=True, exist_ok=True)
        opts.args.report.write_text(dump_json(report), encoding="utf-8")
    if opts.args.pdf:
        from .export.pdf import write_pdf

        write_pdf(opts.args.pdf, evaluation_markdown(report), "Evaluation report")
    _emit({row.iou_type: row.model_dump(exclude={"iou_type"}) for row in report.ap_table}, opts.output_format)
    return 0


def cmd_bench(opts: Options) -> int:
    seed = opts.require_seed()
    walls = opts.get("walls", 3)
    count = int(opts.get("n", 50))
    config = GenConfig(master_seed=seed, n_examples=count, walls_per_part=walls)
    images = [rasterize(sample_example_design(config, i)) for i in range(count)]
    backend = RuleOracleBackend()

    started = time.perf_counter()
    for image in images:
        filter_duplicates(detect_walls(image))
    segmentation = (time.perf_counter() - started) / len(images)

    started = time.perf_counter()
    for image in images:
        run(image, backend, threads=opts.threads, check=False)
    total = (time.perf_counter() - started) / len(images)
    modification = max(total - segmentation, 0.0)

    def row(stage: str, seconds: float, baseline: float) -> BenchRow:
        return BenchRow(
            stage=stage,
            seconds_per_design=round(seconds, 6),
            baseline_s=baseline,
            speedup=round(baseline / seconds, 2) if seconds > 0 else None,
        )

    report = BenchReport(
        designs=len(images),
        walls_per_part=walls,
        threads=opts.threads,
        rows=[
            row("segmentation", segmentation, SEGMENTATION_BASELINE_S),
            row("modification + reintegration", modification, TRANSLATION_BASELINE_S),
            row("end to end", total, SEGMENTATION_BASELINE_S + TRANSLATION_BASELINE_S),
        ],
    )
    if opts.args.report:
        opts.args.report.parent.mkdir(parents=True, exist_ok=True)
        opts.args.report.write_text(dump_json(report), encoding="utf-8")
    if opts.args.pdf:
        from .export.pdf import write_pdf

        write_pdf(opts.args.pdf, bench_markdown(report), "Runtime benchmark")
    _emit([r.model_dump() for r in report.rows], opts.output_format)
    return 0


def cmd_render(opts: Options) -> int:
    before = read_png(opts.args.input)
    if opts.args.after is not None:
        after = read_png(opts.args.after)
    else:
        policy = opts.policy()
        after, _ = run(before, RuleOracleBackend(policy), policy, check=False)

    write_sheet(opts.args.out, before, after)
    _emit({"out": str(opts.args.out)}, opts.output_format)
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "segment": cmd_segment,
    "modify": cmd_modify,
    "pipeline": cmd_pipeline,
    "verify": cmd_verify,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "render": cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        settings = get_settings()
        logging.basicConfig(
            level=getattr(logging, settings.DFM_LOG_LEVEL, logging.INFO),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
        opts = Options(args, _load_config(args.config))
        return COMMANDS[args.command](opts)
    except DfmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
