"""Clustering evaluation: optimal matching, OA, kappa, NMI, ARI, purity.

All metrics are computed from a cluster-vs-class contingency table built over
labeled items only. Overall accuracy uses an optimal one-to-one matching of
clusters to classes, so any relabeling of either side leaves every score
unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyTable, NoLabeledPixels, SizeMismatch


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # rows: predicted clusters, cols: true classes
    row_values: np.ndarray  # original predicted ids per row
    col_values: np.ndarray  # original class ids per column

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class MetricsReport:
    oa: float
    kappa: float
    nmi: float
    ari: float
    purity: float
    per_class_recall: dict[int, float]
    n_items: int
    n_clusters: int
    n_classes: int

    def as_dict(self) -> dict:
        return {
            "oa": self.oa,
            "kappa": self.kappa,
            "nmi": self.nmi,
            "ari": self.ari,
            "purity": self.purity,
            "per_class_recall": {str(k): v for k, v in self.per_class_recall.items()},
            "n_items": self.n_items,
            "n_clusters": self.n_clusters,
            "n_classes": self.n_classes,
        }


def contingency(pred: np.ndarray, true: np.ndarray) -> ContingencyTable:
    pred = np.asarray(pred).ravel()
    true = np.asarray(true).ravel()
    if pred.shape != true.shape:
        raise SizeMismatch("prediction and truth differ in length")
    row_vals, pred_idx = np.unique(pred, return_inverse=True)
    col_vals, true_idx = np.unique(true, return_inverse=True)
    counts = np.zeros((row_vals.size, col_vals.size), dtype=np.int64)
    np.add.at(counts, (pred_idx, true_idx), 1)
    return ContingencyTable(counts=counts, row_values=row_vals, col_values=col_vals)


def _best_total(table: np.ndarray) -> int:
    if table.shape[0] == 0:
        return 0
    rows, cols = linear_sum_assignment(-table)
    return int(table[rows, cols].sum())


def _full_assignment(counts: np.ndarray) -> np.ndarray:
    """Row -> column bijection over the zero-padded square table.

    Among all maximum-trace assignments the lexicographically smallest one is
    returned (row 0 takes the smallest workable column, then row 1, ...);
    matching ties would otherwise leave kappa's chance term ill-defined.
    """
    if counts.size == 0 or counts.sum() == 0:
        raise EmptyTable("cannot match an empty contingency table")
    r, c = counts.shape
    side = max(r, c)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[:r, :c] = counts
    target = _best_total(padded)
    out = np.empty(side, dtype=np.int64)
    remaining_cols = list(range(side))
    achieved = 0
    for i in range(side):
        rest_rows = list(range(i + 1, side))
        for j in remaining_cols:
            cols_left = [col for col in remaining_cols if col != j]
            sub = padded[np.ix_(rest_rows, cols_left)]
            if achieved + padded[i, j] + _best_total(sub) == target:
                out[i] = j
                achieved += padded[i, j]
                remaining_cols.remove(j)
                break
    return out


def hungarian_match(table: ContingencyTable) -> dict[int, int]:
    """One-to-one cluster-to-class map maximizing the matched count.

    The table is zero-padded to square internally; pairs involving padded
    rows or columns are dropped from the returned map.
    """
    counts = table.counts
    assign = _full_assignment(counts)
    r, c = counts.shape
    return {int(i): int(assign[i]) for i in range(r) if assign[i] < c}


def matched_count(table: ContingencyTable) -> int:
    mapping = hungarian_match(table)
    return int(sum(table.counts[i, j] for i, j in mapping.items()))


def _entropy(freq: np.ndarray, n: int) -> float:
    p = freq[freq > 0] / n
    return float(-np.sum(p * np.log(p)))


def _mutual_information(counts: np.ndarray, n: int) -> float:
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    mi = 0.0
    nz = np.nonzero(counts)
    for i, j in zip(*nz):
        pij = counts[i, j] / n
        mi += pij * np.log(pij * n * n / (rows[i] * cols[j]))
    return float(mi)


def _comb2(x: np.ndarray) -> np.ndarray:
    x = x.astype(float)
    return x * (x - 1.0) / 2.0


def evaluate_labels(pred: np.ndarray, true: np.ndarray) -> MetricsReport:
    """Score two flat label vectors (already restricted to labeled items)."""
    pred = np.asarray(pred).ravel()
    true = np.asarray(true).ravel()
    if pred.size == 0:
        raise NoLabeledPixels("no labeled items to evaluate")
    table = contingency(pred, true)
    counts = table.counts
    n = table.total
    assign = _full_assignment(counts)
    mapping = {int(i): int(assign[i]) for i in range(counts.shape[0]) if assign[i] < counts.shape[1]}

    # overall accuracy under the optimal matching
    matched = sum(counts[i, j] for i, j in mapping.items())
    oa = matched / n

    # kappa on the matched (row-permuted) square table; every cluster keeps a
    # row even when outnumbering the classes
    side = max(counts.shape)
    perm = np.zeros((side, side), dtype=np.int64)
    for i in range(counts.shape[0]):
        perm[assign[i], : counts.shape[1]] = counts[i]
    po = np.trace(perm) / n
    pe = float(np.sum(perm.sum(axis=1).astype(float) * perm.sum(axis=0))) / n**2
    if abs(1.0 - pe) < 1e-15:
        kappa = 1.0 if abs(po - 1.0) < 1e-15 else 0.0
    else:
        kappa = (po - pe) / (1.0 - pe)

    # NMI with arithmetic-mean normalization
    hu = _entropy(counts.sum(axis=1), n)
    hv = _entropy(counts.sum(axis=0), n)
    if hu == 0.0 and hv == 0.0:
        nmi = 1.0
    else:
        denom = (hu + hv) / 2.0
        nmi = _mutual_information(counts, n) / denom if denom > 0 else 0.0
        nmi = float(max(0.0, nmi))

    # ARI by pair counting with adjusted expectation
    sum_ij = float(np.sum(_comb2(counts)))
    sum_rows = float(np.sum(_comb2(counts.sum(axis=1))))
    sum_cols = float(np.sum(_comb2(counts.sum(axis=0))))
    pairs = n * (n - 1) / 2.0
    expected = sum_rows * sum_cols / pairs if pairs > 0 else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if abs(max_index - expected) < 1e-15:
        ari = 1.0
    else:
        ari = (sum_ij - expected) / (max_index - expected)

    purity = float(np.sum(counts.max(axis=1))) / n

    per_class = {}
    inverse = {j: i for i, j in mapping.items()}
    for jj, cls in enumerate(table.col_values):
        col_total = int(counts[:, jj].sum())
        ii = inverse.get(jj)
        hit = int(counts[ii, jj]) if ii is not None else 0
        per_class[int(cls)] = hit / col_total if col_total else 0.0

    return MetricsReport(
        oa=float(oa),
        kappa=float(kappa),
        nmi=float(nmi),
        ari=float(ari),
        purity=float(purity),
        per_class_recall=per_class,
        n_items=n,
        n_clusters=counts.shape[0],
        n_classes=counts.shape[1],
    )


def compute_metrics(pred_map: np.ndarray, gt_map: np.ndarray) -> MetricsReport:
    """Score a predicted label map against ground truth, ignoring gt == 0."""
    pred_map = np.asarray(pred_map)
    gt_map = np.asarray(gt_map)
    if pred_map.shape != gt_map.shape:
        raise SizeMismatch(
            f"prediction {pred_map.shape} and ground truth {gt_map.shape} differ"
        )
    mask = gt_map > 0
    if not np.any(mask):
        raise NoLabeledPixels("ground truth has no labeled pixels")
    return evaluate_labels(pred_map[mask], gt_map[mask])


def agreement_rate(a: np.ndarray, b: np.ndarray) -> float:
    """Fraction of items on which two clusterings agree under optimal matching."""
    return matched_count(contingency(a, b)) / len(np.asarray(a).ravel())


@dataclass(frozen=True)
class ScatterDiagnostic:
    intra: float
    inter: float
    all_singletons: bool


def scatter_diagnostic(z: np.ndarray, labels: np.ndarray) -> ScatterDiagnostic:
    """Mean within-cluster pairwise squared distance and mean squared distance
    between cluster centroids."""
    z = np.asarray(z, dtype=float)
    labels = np.asarray(labels).ravel()
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise ValueError("scatter diagnostic needs at least 2 clusters")
    intra_means = []
    centroids = []
    for u in uniq:
        pts = z[labels == u]
        centroids.append(pts.mean(axis=0))
        if pts.shape[0] >= 2:
            d2 = (
                np.sum(pts**2, axis=1)[:, None]
                + np.sum(pts**2, axis=1)[None, :]
                - 2.0 * pts @ pts.T
            )
            iu = np.triu_indices(pts.shape[0], k=1)
            intra_means.append(float(np.mean(np.maximum(d2[iu], 0.0))))
    centroids = np.asarray(centroids)
    cd2 = (
        np.sum(centroids**2, axis=1)[:, None]
        + np.sum(centroids**2, axis=1)[None, :]
        - 2.0 * centroids @ centroids.T
    )
    iu = np.triu_indices(centroids.shape[0], k=1)
    inter = float(np.mean(np.maximum(cd2[iu], 0.0)))
    if intra_means:
        return ScatterDiagnostic(
            intra=float(np.mean(intra_means)), inter=inter, all_singletons=False
        )
    return ScatterDiagnostic(intra=0.0, inter=inter, all_singletons=True)
