"""
Markdown rendering of evaluation and bench reports.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..models import BenchReport, EvaluationReport


def _fmt(value: Optional[float], digits: int = 1) -> str:
    return "absent" if value is None else f"{value:.{digits}f}"


def _table(headers: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join("---" for _ in headers) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines)


def evaluation_markdown(report: EvaluationReport, title: str = "Evaluation report") -> str:
    parts = [f"# {title}"]
    if report.ap_table:
        parts.append("## Average precision")
        parts.append(
            _table(
                ["IOU type", "AP", "AP50", "AP75", "AP small", "AP medium", "AP large"],
                (
                    [
                        row.iou_type,
                        _fmt(row.AP),
                        _fmt(row.AP50),
                        _fmt(row.AP75),
                        _fmt(row.AP_small),
                        _fmt(row.AP_medium),
                        _fmt(row.AP_large),
                    ]
                    for row in report.ap_table
                ),
            )
        )
    if report.designs:
        detected = sum(d.detected for d in report.designs)
        expected = sum(d.expected for d in report.designs)
        agree = sum(1 for d in report.designs if d.kinds_agree)
        parts.append("## Detection")
        parts.append(
            f"{detected} of {expected} walls detected; "
            f"kinds agree on {agree} of {len(report.designs)} designs."
        )
    if report.verifier_clean_fraction is not None:
        parts.append("## Verification")
        parts.append(f"Verifier-clean designs: {100.0 * report.verifier_clean_fraction:.1f} %")
        dirty = [d for d in report.designs if d.violations]
        if dirty:
            parts.append(
                _table(
                    ["Design", "Wall", "Rule", "Measured", "Allowed"],
                    (
                        [str(d.index), str(v.wall_index), v.rule_id, f"{v.measured:.3f}", f"[{v.allowed[0]:.3f}, {v.allowed[1]:.3f}]"]
                        for d in dirty
                        for v in d.violations
                    ),
                )
            )
    if report.pixel_agreement:
        parts.append("## Translation pixel agreement")
        parts.append(
            _table(["Wall kind", "Agreement"], ([k, f"{v:.4f}"] for k, v in sorted(report.pixel_agreement.items())))
        )
    if report.tolerances:
        parts.append("## Verifier tolerances")
        parts.append(_table(["Tolerance", "Value"], ([k, f"{v:g}"] for k, v in sorted(report.tolerances.items()))))
    return "\n\n".join(parts) + "\n"


def bench_markdown(report: BenchReport, title: str = "Runtime benchmark") -> str:
    header = (
        f"{report.designs} designs, {report.walls_per_part} walls each, "
        f"{report.threads} thread(s)."
    )
    table = _table(
        ["Stage", "Seconds / design", "Baseline (s)", "Speed-up"],
        (
            [
                row.stage,
                f"{row.seconds_per_design:.4f}",
                _fmt(row.baseline_s, 3),
                "" if row.speedup is None else f"{row.speedup:.1f}x",
            ]
            for row in report.rows
        ),
    )
    return f"# {title}\n\n{header}\n\n{table}\n"
