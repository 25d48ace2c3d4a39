"""Exception hierarchy shared by every stage of the DFM engine."""

from __future__ import annotations

from pathlib import Path


class DfmError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class GeometryError(DfmError):
    """A profile cannot be realized (infeasible fillet, self-intersection)."""


class OverlapError(GeometryError):
    """Treated wall footprints intersect."""


class FrameOverflow(DfmError):
    """Geometry does not fit inside the raster frame."""


class TooManyWalls(DfmError):
    """More than nine walls of one kind; the two-digit mask code cannot number them."""


class CropTooLarge(DfmError):
    """Magnified feature content does not fit the 256 px feature frame."""


class NotThick(DfmError):
    """Coring was requested for a wall that is not a thick wall."""


class PlacementFailure(DfmError):
    """Rejection sampling could not place the requested walls."""


class NoBottomWall(DfmError):
    """No horizontal bottom band was found in the image."""


class EmptyImage(DfmError):
    """The image has no foreground pixels."""


class NoWallFound(DfmError):
    """No vertical wall stands above the bottom band."""


class MultipleWalls(DfmError):
    """A single-feature raster contains more than one wall."""


class ShapeMismatch(DfmError):
    """Two rasters that must be compared have different shapes."""


class EmptyGroundTruth(DfmError):
    """Every design handed to a metric had an empty ground-truth list."""


class BackendError(DfmError):
    """A modification backend failed or returned an invalid raster."""


class PipelineError(DfmError):
    """A pipeline stage failed for one feature."""

    def __init__(self, feature_index: int, message: str) -> None:
        super().__init__(f"feature {feature_index}: {message}")
        self.feature_index = feature_index


class DatasetWriteError(DfmError):
    """A dataset file could not be written."""

    def __init__(self, path: Path, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
