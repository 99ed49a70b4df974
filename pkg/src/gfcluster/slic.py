"""Superpixel segmentation by localized k-means over (color, y, x).

Seeds start on a regular grid with interval S = sqrt(hw/N); each iteration
reassigns pixels inside a window around every seed using
D^2 = d_color^2 + m^2 * d_spatial^2 / S^2 and recenters seeds on their
members. A post-pass enforces 4-connectivity by merging orphan fragments
into their largest finally-labeled neighbor. The whole procedure is
deterministic; the seed argument is accepted for interface symmetry only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid, TooManySuperpixels
from .hsi import HsiCube


@dataclass(frozen=True)
class SuperpixelSegmentation:
    assignment: np.ndarray  # h x w superpixel ids in [0, n_superpixels)
    n_superpixels: int
    sizes: np.ndarray

    @property
    def height(self) -> int:
        return self.assignment.shape[0]

    @property
    def width(self) -> int:
        return self.assignment.shape[1]


def _seed_grid(h: int, w: int, n_target: int) -> tuple[np.ndarray, np.ndarray, int, int]:
    n_rows = max(1, round(np.sqrt(n_target * h / w)))
    n_rows = min(n_rows, h, n_target)
    n_cols = max(1, min(round(n_target / n_rows), w))
    ys = (np.arange(n_rows) + 0.5) * h / n_rows - 0.5
    xs = (np.arange(n_cols) + 0.5) * w / n_cols - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return yy.ravel(), xx.ravel(), n_rows, n_cols


def _connected_components(labels: np.ndarray) -> np.ndarray:
    """Component id per pixel for 4-connected equal-label regions."""
    h, w = labels.shape
    parent = np.arange(h * w)

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    flat = labels.ravel()
    idx = np.arange(h * w).reshape(h, w)
    pairs = []
    right = labels[:, :-1] == labels[:, 1:]
    pairs.append((idx[:, :-1][right], idx[:, 1:][right]))
    down = labels[:-1, :] == labels[1:, :]
    pairs.append((idx[:-1, :][down], idx[1:, :][down]))
    for a_arr, b_arr in pairs:
        for a, b in zip(a_arr.tolist(), b_arr.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.empty(h * w, dtype=np.int64)
    for i in range(h * w):
        roots[i] = find(i)
    _, comp = np.unique(roots, return_inverse=True)
    return comp.reshape(h, w)


def _enforce_connectivity(labels: np.ndarray) -> np.ndarray:
    """Keep the largest fragment of every label; merge the rest into the
    largest adjacent region that already has a final label."""
    h, w = labels.shape
    comp = _connected_components(labels)
    n_comp = int(comp.max()) + 1
    flat_comp = comp.ravel()
    sizes = np.bincount(flat_comp, minlength=n_comp)
    first_pixel = np.full(n_comp, h * w, dtype=np.int64)
    np.minimum.at(first_pixel, flat_comp, np.arange(h * w))
    comp_label = np.full(n_comp, -1, dtype=np.int64)
    comp_label[flat_comp] = labels.ravel()

    final = np.full(n_comp, -1, dtype=np.int64)
    for v in np.unique(labels):
        cands = np.flatnonzero(comp_label == v)
        order = sorted(cands.tolist(), key=lambda c: (-sizes[c], first_pixel[c]))
        final[order[0]] = v

    # adjacency between components
    neighbors: dict[int, set[int]] = {c: set() for c in range(n_comp)}
    a = comp[:, :-1].ravel()
    b = comp[:, 1:].ravel()
    for pa, pb in zip(a.tolist(), b.tolist()):
        if pa != pb:
            neighbors[pa].add(pb)
            neighbors[pb].add(pa)
    a = comp[:-1, :].ravel()
    b = comp[1:, :].ravel()
    for pa, pb in zip(a.tolist(), b.tolist()):
        if pa != pb:
            neighbors[pa].add(pb)
            neighbors[pb].add(pa)

    pending = sorted(
        (c for c in range(n_comp) if final[c] < 0), key=lambda c: first_pixel[c]
    )
    while pending:
        progressed = False
        deferred = []
        for c in pending:
            labeled = [nb for nb in neighbors[c] if final[nb] >= 0]
            if not labeled:
                deferred.append(c)
                continue
            best = min(labeled, key=lambda nb: (-sizes[nb], final[nb]))
            final[c] = final[best]
            progressed = True
        if not progressed:
            # isolated group with no labeled neighbor anywhere: absorb into
            # the globally largest labeled component
            anchor = max(
                (c for c in range(n_comp) if final[c] >= 0),
                key=lambda c: (sizes[c], -first_pixel[c]),
            )
            final[deferred[0]] = final[anchor]
            deferred = deferred[1:]
        pending = deferred

    merged = final[comp]
    # compact ids in raster order of first appearance
    seen: dict[int, int] = {}
    out = np.empty_like(merged)
    flat = merged.ravel()
    compact = np.empty(flat.shape[0], dtype=np.int64)
    for i, v in enumerate(flat.tolist()):
        if v not in seen:
            seen[v] = len(seen)
        compact[i] = seen[v]
    out = compact.reshape(h, w)
    return out


def slic_segment(
    cube: HsiCube,
    n_target: int,
    compactness: float = 1.0,
    iters: int = 10,
    seed: int = 0,
) -> SuperpixelSegmentation:
    """Segment the cube into roughly ``n_target`` 4-connected superpixels."""
    h, w, b = cube.height, cube.width, cube.bands
    if n_target > h * w:
        raise TooManySuperpixels(f"asked for {n_target} superpixels on {h * w} pixels")
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    if iters < 1:
        raise ValueError("iters must be >= 1")

    data = cube.data
    cy, cx, n_rows, n_cols = _seed_grid(h, w, n_target)
    k = cy.shape[0]
    py = np.clip(np.rint(cy).astype(int), 0, h - 1)
    px = np.clip(np.rint(cx).astype(int), 0, w - 1)
    colors = data[py, px, :].astype(float).copy()

    interval = np.sqrt(h * w / n_target)
    step_y = max(h / n_rows, 1.0)
    step_x = max(w / n_cols, 1.0)
    ratio = compactness**2 / interval**2

    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    # initial assignment: the grid cell each pixel falls in
    row0 = np.clip(((yy + 0.5) * n_rows / h).astype(int), 0, n_rows - 1)
    col0 = np.clip(((xx + 0.5) * n_cols / w).astype(int), 0, n_cols - 1)
    labels = row0 * n_cols + col0

    for _ in range(iters):
        best = np.full((h, w), np.inf)
        new_labels = labels.copy()
        for s in range(k):
            y0 = max(int(np.floor(cy[s] - step_y)), 0)
            y1 = min(int(np.ceil(cy[s] + step_y)) + 1, h)
            x0 = max(int(np.floor(cx[s] - step_x)), 0)
            x1 = min(int(np.ceil(cx[s] + step_x)) + 1, w)
            if y0 >= y1 or x0 >= x1:
                continue
            patch = data[y0:y1, x0:x1, :]
            dc = np.sum((patch - colors[s]) ** 2, axis=2)
            dy = yy[y0:y1, x0:x1] - cy[s]
            dx = xx[y0:y1, x0:x1] - cx[s]
            dist = dc + ratio * (dy**2 + dx**2)
            win = dist < best[y0:y1, x0:x1]
            best[y0:y1, x0:x1][win] = dist[win]
            new_labels[y0:y1, x0:x1][win] = s
        labels = new_labels
        flat = labels.ravel()
        counts = np.bincount(flat, minlength=k).astype(float)
        occupied = counts > 0
        sum_y = np.bincount(flat, weights=yy.ravel(), minlength=k)
        sum_x = np.bincount(flat, weights=xx.ravel(), minlength=k)
        cy = np.where(occupied, sum_y / np.maximum(counts, 1.0), cy)
        cx = np.where(occupied, sum_x / np.maximum(counts, 1.0), cx)
        for band in range(b):
            sums = np.bincount(flat, weights=data[:, :, band].ravel(), minlength=k)
            colors[occupied, band] = sums[occupied] / counts[occupied]

    labels = _enforce_connectivity(labels)
    n = int(labels.max()) + 1
    sizes = np.bincount(labels.ravel(), minlength=n)
    labels.setflags(write=False)
    sizes.setflags(write=False)
    return SuperpixelSegmentation(assignment=labels, n_superpixels=n, sizes=sizes)


def identity_segmentation(h: int, w: int, max_nodes: int = 4096) -> SuperpixelSegmentation:
    """Every pixel its own superpixel (segmentation-free ablation mode)."""
    if h * w > max_nodes:
        raise ConfigInvalid(
            f"identity segmentation of {h * w} pixels exceeds the {max_nodes}-node ceiling"
        )
    labels = np.arange(h * w, dtype=np.int64).reshape(h, w)
    labels.setflags(write=False)
    sizes = np.ones(h * w, dtype=np.int64)
    sizes.setflags(write=False)
    return SuperpixelSegmentation(assignment=labels, n_superpixels=h * w, sizes=sizes)
