"""Least-squares adversarial losses with an L1 reconstruction term."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import ShapeMismatch


def _squared_sum(values: Sequence[float], target: float, normalize: bool) -> float:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("discriminator outputs must be nonempty")
    total = float(np.sum((arr - target) ** 2))
    return total / arr.size if normalize else total


def lsgan_d_loss(d_real: Sequence[float], d_fake: Sequence[float], normalize: bool = False) -> float:
    """Sum of (d_real - 1)^2 plus sum of d_fake^2; per-term means when normalize."""
    return _squared_sum(d_real, 1.0, normalize) + _squared_sum(d_fake, 0.0, normalize)


def lsgan_g_loss(
    d_fake: Sequence[float],
    g_out: np.ndarray,
    target: np.ndarray,
    lam: float,
    normalize: bool = False,
) -> float:
    """Sum of (d_fake - 1)^2 plus lam times the L1 distance of the rasters in [0, 1] intensity."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    g_out, target = np.asarray(g_out, dtype=float), np.asarray(target, dtype=float)
    if g_out.shape != target.shape:
        raise ShapeMismatch(f"{g_out.shape} vs {target.shape}")
    l1 = float(np.sum(np.abs(g_out - target))) / 255.0
    if normalize and g_out.size:
        l1 /= g_out.size
    return _squared_sum(d_fake, 1.0, normalize) + lam * l1
