"""
Segment -> crop -> modify -> paste pipeline with pluggable backends.
"""

from .backends import (
    ExternalCommandBackend,
    IdentityBackend,
    ModificationBackend,
    RuleOracleBackend,
    check_output,
    make_backend,
)
from .fit import FeatureFit, fit_feature, fit_wall_spec, single_run
from .runner import FeatureJob, prepare_jobs, run

__all__ = [
    "ExternalCommandBackend",
    "IdentityBackend",
    "ModificationBackend",
    "RuleOracleBackend",
    "check_output",
    "make_backend",
    "FeatureFit",
    "fit_feature",
    "fit_wall_spec",
    "single_run",
    "FeatureJob",
    "prepare_jobs",
    "run",
]
