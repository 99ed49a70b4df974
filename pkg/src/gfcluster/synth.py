"""Synthetic labeled cubes: blocked class regions with Gaussian-perturbed spectra."""

from __future__ import annotations

import math

import numpy as np

from .hsi import HsiCube, make_cube


def class_layout(height: int, width: int, classes: int) -> np.ndarray:
    """Near-square grid of rectangular blocks, one class per cell (wrapping
    when there are more cells than classes). Returns 1-based class ids."""
    cols = math.ceil(math.sqrt(classes))
    rows = math.ceil(classes / cols)
    ys = np.minimum(np.arange(height) * rows // height, rows - 1)
    xs = np.minimum(np.arange(width) * cols // width, cols - 1)
    cell = ys[:, None] * cols + xs[None, :]
    return (cell % classes) + 1


def class_means(classes: int, bands: int, separation: float, seed: int) -> np.ndarray:
    """Class-mean spectra with pairwise distance ``separation``.

    Uses scaled one-hot axes when classes <= bands (exactly equidistant);
    otherwise random directions rescaled so the closest pair sits at
    ``separation``.
    """
    if classes <= bands:
        means = np.zeros((classes, bands))
        means[np.arange(classes), np.arange(classes)] = separation / np.sqrt(2.0)
        return means
    rng = np.random.default_rng([seed, 7])
    means = rng.standard_normal((classes, bands))
    d2 = (
        np.sum(means**2, axis=1)[:, None]
        + np.sum(means**2, axis=1)[None, :]
        - 2.0 * means @ means.T
    )
    np.fill_diagonal(d2, np.inf)
    closest = np.sqrt(max(d2.min(), 1e-12))
    return means * (separation / closest)


def synth_cube(
    height: int,
    width: int,
    bands: int,
    classes: int,
    noise: float,
    separation: float,
    seed: int,
) -> tuple[HsiCube, np.ndarray]:
    """Piecewise-constant class image plus per-pixel Gaussian spectral noise.

    Returns the cube and a fully labeled ground-truth grid (ids 1..classes).
    """
    if min(height, width, bands, classes) < 1:
        raise ValueError("all dimensions must be positive")
    if noise < 0 or separation < 0:
        raise ValueError("noise and separation must be non-negative")
    gt = class_layout(height, width, classes)
    means = class_means(classes, bands, separation, seed)
    rng = np.random.default_rng([seed, 8])
    data = means[gt - 1] + noise * rng.standard_normal((height, width, bands))
    # round-trip through the on-disk precision so saved and in-memory views agree
    data = data.astype("<f4").astype(float)
    return make_cube(data), gt.astype(np.int64)
