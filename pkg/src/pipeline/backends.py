"""
Modification backends: raster in, raster out, one wall feature at a time.

Handles:
- Rule oracle (fit the wall, apply the DFM rules, re-render)
- Identity (pass-through, for measuring resampling loss)
- External command adapter exchanging PNG files through a temp directory
"""

from __future__ import annotations

import logging
import shlex
import subprocess
import tempfile
from pathlib import Path
from typing import Optional, Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import BackendError
from ..evaluate.measure import EDGE_TOLERANCE_PX, measure_run
from ..evaluate.verify import check_measurement
from ..geometry.shapes import FEATURE_UNITS_PER_PIXEL, PART_UNITS_PER_PIXEL, UnitScale, WallKind
from ..raster.io import read_png, write_png
from ..raster.render import BACKGROUND, FOREGROUND, RASTER_SIZE, Raster, rasterize
from ..rules.engine import RulePolicy, make_manufacturable
from ..segmenter.bands import find_band
from .fit import fit_feature, single_run

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT_S = 60.0
# Crops are upsampled part-canvas staircases: an edge may sit half a canvas
# pixel off the true face before the feature grid quantizes it again.
CROP_EDGE_TOLERANCE_PX = EDGE_TOLERANCE_PX + 0.5 * PART_UNITS_PER_PIXEL / FEATURE_UNITS_PER_PIXEL


@runtime_checkable
class ModificationBackend(Protocol):
    name: str

    def __call__(self, feature: Raster, kind: WallKind) -> Raster:
        ...


class RuleOracleBackend:
    """Features that already measure clean are returned as-is."""

    name = "rule"

    def __init__(self, policy: Optional[RulePolicy] = None) -> None:
        self.policy = policy or RulePolicy()

    def __call__(self, feature: Raster, kind: WallKind) -> Raster:
        band = find_band(feature)
        run = single_run(feature, band)
        if not check_measurement(measure_run(feature, band, run, kind, CROP_EDGE_TOLERANCE_PX), 0, self.policy.bounds):
            return feature
        fit = fit_feature(feature, kind)
        treated = make_manufacturable(fit.wall, fit.bottom_thickness, self.policy)
        return rasterize(fit.design(treated), fit.frame, UnitScale.feature())


class IdentityBackend:
    name = "identity"

    def __call__(self, feature: Raster, kind: WallKind) -> Raster:
        return feature


class ExternalCommandBackend:
    """Runs a command per feature.

    The command is a template; `{input}`, `{output}` and `{kind}` are
    substituted with the input PNG path, the expected output PNG path and
    the wall kind.
    """

    name = "external"

    def __init__(self, command: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT_S) -> None:
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ValueError("external backend needs a command")
        self.timeout = timeout

    def __call__(self, feature: Raster, kind: WallKind) -> Raster:
        with tempfile.TemporaryDirectory(prefix="dfm-backend-") as tmp:
            source = Path(tmp) / "input.png"
            target = Path(tmp) / "output.png"
            write_png(source, feature)
            argv = [part.format(input=source, output=target, kind=kind.value) for part in self.argv]
            try:
                completed = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout, check=False)
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise BackendError(f"{argv[0]}: {exc}") from exc
            if completed.returncode != 0:
                tail = (completed.stderr or "").strip().splitlines()[-1:] or [""]
                raise BackendError(f"{argv[0]} exited with {completed.returncode}: {tail[0]}")
            if not target.exists():
                raise BackendError(f"{argv[0]} wrote no output image")
            try:
                output = read_png(target)
            except (OSError, ValueError) as exc:
                raise BackendError(str(exc)) from exc
        return np.where(output >= 128, FOREGROUND, BACKGROUND).astype(np.uint8)


def make_backend(
    name: str,
    policy: Optional[RulePolicy] = None,
    command: Optional[str] = None,
) -> ModificationBackend:
    if name == RuleOracleBackend.name:
        return RuleOracleBackend(policy)
    if name == IdentityBackend.name:
        return IdentityBackend()
    if name == ExternalCommandBackend.name:
        if not command:
            raise ValueError("the external backend needs --backend-command")
        return ExternalCommandBackend(command)
    raise ValueError(f"unknown backend {name!r}")


def check_output(output: Raster) -> Raster:
    """Backend outputs must be 256x256 single-channel rasters."""
    output = np.asarray(output)
    if output.shape != (RASTER_SIZE, RASTER_SIZE):
        raise BackendError(f"backend returned shape {output.shape}")
    return output.astype(np.uint8, copy=False)
