"""Hyperspectral cube container, raw-file I/O, and PCA band reduction.

On disk a cube is raw little-endian float32 in band-sequential order plus a
JSON sidecar declaring {height, width, bands, dtype, interleave}. Ground
truth is raw little-endian uint16, row-major, 0 meaning unlabeled.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import MalformedSidecar, SizeMismatch, UnsupportedDtype


@dataclass(frozen=True)
class HsiCube:
    data: np.ndarray  # h x w x b, float64 in memory

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]

    def flatten_pixels(self) -> np.ndarray:
        """hw x b view in row-major pixel order."""
        return self.data.reshape(-1, self.bands)


def make_cube(data: np.ndarray) -> HsiCube:
    data = np.asarray(data, dtype=float)
    if data.ndim != 3 or min(data.shape) < 1:
        raise ValueError("cube data must be h x w x b with positive dims")
    if not np.all(np.isfinite(data)):
        raise ValueError("cube values must be finite")
    data = data.copy()
    data.setflags(write=False)
    return HsiCube(data=data)


@dataclass(frozen=True)
class PcaInfo:
    explained_variance: np.ndarray  # variance captured per kept axis
    explained_ratio: float  # kept fraction of total variance
    degenerate: bool  # all pixels identical; output is zeros
    axes: np.ndarray  # bands x p projection basis


def _read_sidecar(path) -> dict:
    # unreadable file is an I/O problem for the caller; only parse failures
    # count as malformed
    try:
        with open(path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except ValueError as exc:
        raise MalformedSidecar(f"cannot parse sidecar {path}: {exc}") from exc
    for key in ("height", "width", "bands", "dtype", "interleave"):
        if key not in meta:
            raise MalformedSidecar(f"sidecar missing field {key!r}")
    return meta


def load_cube(path, sidecar_path) -> HsiCube:
    meta = _read_sidecar(sidecar_path)
    h, w, b = int(meta["height"]), int(meta["width"]), int(meta["bands"])
    if min(h, w, b) < 1:
        raise MalformedSidecar("sidecar dimensions must be positive")
    if meta["dtype"] != "float32":
        raise UnsupportedDtype(f"cube dtype {meta['dtype']!r} not supported")
    if meta["interleave"] != "bsq":
        raise UnsupportedDtype(f"interleave {meta['interleave']!r} not supported")
    expected = h * w * b * 4
    actual = os.path.getsize(path)
    if actual != expected:
        raise SizeMismatch(f"cube file holds {actual} bytes, sidecar implies {expected}")
    raw = np.fromfile(path, dtype="<f4").reshape(b, h, w)
    return make_cube(np.ascontiguousarray(raw.transpose(1, 2, 0)))


def save_cube(cube: HsiCube, path, sidecar_path) -> None:
    arr = cube.data.transpose(2, 0, 1).astype("<f4")
    arr.tofile(path)
    meta = {
        "height": cube.height,
        "width": cube.width,
        "bands": cube.bands,
        "dtype": "float32",
        "interleave": "bsq",
    }
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_gt(path, height: int, width: int) -> np.ndarray:
    expected = height * width * 2
    actual = os.path.getsize(path)
    if actual != expected:
        raise SizeMismatch(f"gt file holds {actual} bytes, expected {expected}")
    return np.fromfile(path, dtype="<u2").reshape(height, width).astype(np.int64)


def save_gt(gt: np.ndarray, path) -> None:
    gt = np.asarray(gt)
    if gt.min() < 0 or gt.max() > np.iinfo("<u2").max:
        raise ValueError("ground-truth ids must fit in uint16")
    gt.astype("<u2").tofile(path)


def pca_reduce(cube: HsiCube, p: int) -> tuple[HsiCube, PcaInfo]:
    """Project each pixel spectrum onto the top-p principal axes.

    Axes come from the covariance of the mean-centered pixel cloud; signs are
    fixed so the largest-magnitude coordinate of each axis is positive.
    """
    if not (1 <= p <= cube.bands):
        raise ValueError("component count must lie in [1, bands]")
    pixels = cube.flatten_pixels()
    centered = pixels - pixels.mean(axis=0)
    if not np.any(centered):
        zeros = np.zeros((cube.height, cube.width, p))
        info = PcaInfo(
            explained_variance=np.zeros(p),
            explained_ratio=0.0,
            degenerate=True,
            axes=np.zeros((cube.bands, p)),
        )
        return make_cube(zeros), info
    denom = max(pixels.shape[0] - 1, 1)
    cov = centered.T @ centered / denom
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1][:p]
    axes = vecs[:, order]
    flips = np.sign(axes[np.argmax(np.abs(axes), axis=0), np.arange(p)])
    flips[flips == 0] = 1.0
    axes = axes * flips
    projected = centered @ axes
    kept = np.maximum(vals[order], 0.0)
    total = float(np.sum(np.maximum(vals, 0.0)))
    info = PcaInfo(
        explained_variance=kept,
        explained_ratio=float(kept.sum() / total) if total > 0 else 0.0,
        degenerate=False,
        axes=axes,
    )
    return make_cube(projected.reshape(cube.height, cube.width, p)), info
