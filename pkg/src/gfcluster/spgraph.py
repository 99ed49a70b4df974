"""From segmentation to graph: pixel assignment, node features, region adjacency.

Node features are the mean spectrum of each superpixel's member pixels;
edges connect superpixels within a hop radius of the region-adjacency graph,
weighted by exp(-rho * ||X_i - X_j||^2) on the full-spectrum features.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatch
from .graph_core import Graph, make_graph
from .hsi import HsiCube
from .slic import SuperpixelSegmentation

UNLABELED = -1


@dataclass(frozen=True)
class AssignmentMatrix:
    """Pixel-to-superpixel membership, stored as the segmentation grid.

    ``materialize()`` yields the explicit hw x N one-hot matrix;
    ``materialize_normalized()`` divides each column by the member count.
    """

    seg: SuperpixelSegmentation

    @property
    def n_pixels(self) -> int:
        return self.seg.assignment.size

    @property
    def n_superpixels(self) -> int:
        return self.seg.n_superpixels

    def materialize(self) -> np.ndarray:
        q = np.zeros((self.n_pixels, self.n_superpixels))
        q[np.arange(self.n_pixels), self.seg.assignment.ravel()] = 1.0
        return q

    def materialize_normalized(self) -> np.ndarray:
        return self.materialize() / self.seg.sizes[None, :]


@dataclass(frozen=True)
class SuperpixelGraph:
    graph: Graph
    seg: SuperpixelSegmentation
    assignment: AssignmentMatrix


def build_assignment(seg: SuperpixelSegmentation) -> AssignmentMatrix:
    return AssignmentMatrix(seg=seg)


def project_to_nodes(cube: HsiCube, qm: AssignmentMatrix) -> np.ndarray:
    """Mean spectrum of each superpixel: X = Qhat^T . Flatten(cube)."""
    seg = qm.seg
    if (cube.height, cube.width) != (seg.height, seg.width):
        raise SizeMismatch("cube and segmentation disagree on spatial dims")
    flat = seg.assignment.ravel()
    n = seg.n_superpixels
    x = np.empty((n, cube.bands))
    for band in range(cube.bands):
        sums = np.bincount(flat, weights=cube.data[:, :, band].ravel(), minlength=n)
        x[:, band] = sums / seg.sizes
    return x


def region_adjacency(seg: SuperpixelSegmentation) -> list[set[int]]:
    """1-hop neighbor sets: superpixels sharing a pixel border."""
    a = seg.assignment
    nbrs: list[set[int]] = [set() for _ in range(seg.n_superpixels)]
    for left, right in (
        (a[:, :-1].ravel(), a[:, 1:].ravel()),
        (a[:-1, :].ravel(), a[1:, :].ravel()),
    ):
        diff = left != right
        for i, j in set(zip(left[diff].tolist(), right[diff].tolist())):
            nbrs[i].add(j)
            nbrs[j].add(i)
    return nbrs


def hop_neighbors(nbrs: list[set[int]], t_hop: int) -> list[set[int]]:
    """Nodes reachable within t_hop steps, excluding the node itself."""
    if t_hop < 1:
        raise ValueError("t_hop must be >= 1")
    out = [set(s) for s in nbrs]
    frontier = [set(s) for s in nbrs]
    for _ in range(t_hop - 1):
        new_frontier = []
        for i in range(len(nbrs)):
            ext = set()
            for j in frontier[i]:
                ext |= nbrs[j]
            ext -= out[i]
            ext.discard(i)
            out[i] |= ext
            new_frontier.append(ext)
        frontier = new_frontier
    return out


def build_adjacency(
    x: np.ndarray,
    seg: SuperpixelSegmentation,
    t_hop: int = 1,
    rho: float = 0.2,
) -> Graph:
    """Gaussian-kernel weights on hop-limited region-adjacency pairs."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    x = np.asarray(x, dtype=float)
    nbrs = hop_neighbors(region_adjacency(seg), t_hop)
    edges = []
    for i in range(seg.n_superpixels):
        for j in sorted(nbrs[i]):
            if j > i:
                w = float(np.exp(-rho * np.sum((x[i] - x[j]) ** 2)))
                edges.append((i, j, w))
    return make_graph(seg.n_superpixels, edges, features=x)


def backproject_labels(node_labels: np.ndarray, seg: SuperpixelSegmentation) -> np.ndarray:
    """Spread node labels back onto the pixel grid."""
    node_labels = np.asarray(node_labels)
    if node_labels.shape[0] != seg.n_superpixels:
        raise SizeMismatch("one label per superpixel required")
    return node_labels[seg.assignment]


def majority_gt_per_node(gt: np.ndarray, seg: SuperpixelSegmentation) -> np.ndarray:
    """Modal labeled class per superpixel; UNLABELED where no member pixel
    carries a label; ties resolve to the smallest class id."""
    gt = np.asarray(gt)
    if gt.shape != seg.assignment.shape:
        raise SizeMismatch("ground truth and segmentation disagree on dims")
    out = np.full(seg.n_superpixels, UNLABELED, dtype=np.int64)
    flat_seg = seg.assignment.ravel()
    flat_gt = gt.ravel()
    labeled = flat_gt > 0
    if not np.any(labeled):
        return out
    seg_l = flat_seg[labeled]
    gt_l = flat_gt[labeled]
    classes = np.unique(gt_l)
    counts = np.zeros((seg.n_superpixels, classes.size), dtype=np.int64)
    class_idx = np.searchsorted(classes, gt_l)
    np.add.at(counts, (seg_l, class_idx), 1)
    has_any = counts.sum(axis=1) > 0
    # argmax picks the first (smallest) class on ties
    out[has_any] = classes[np.argmax(counts[has_any], axis=1)]
    return out
