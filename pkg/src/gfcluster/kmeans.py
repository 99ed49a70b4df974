"""K-means++ seeding and Lloyd iterations with deterministic tie-breaking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFewDistinctPoints


@dataclass(frozen=True)
class KMeansResult:
    centers: np.ndarray
    labels: np.ndarray
    inertia: float
    iterations: int
    inertia_history: tuple[float, ...]


def _assign(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        + np.sum(centers**2, axis=1)[None, :]
        - 2.0 * points @ centers.T
    )
    d2 = np.maximum(d2, 0.0)
    # np.argmin resolves ties to the smallest center index
    return np.argmin(d2, axis=1), d2


def kmeanspp_init(points: np.ndarray, k: int, seed: int) -> np.ndarray:
    """D^2-weighted sequential seeding, deterministic given the seed."""
    points = np.asarray(points, dtype=float)
    if np.unique(points, axis=0).shape[0] < k:
        raise TooFewDistinctPoints(f"need at least {k} distinct points")
    rng = np.random.default_rng(seed)
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining mass at already-chosen locations; take the first
            # point not coincident with a chosen center
            chosen = centers[:c]
            for idx in range(n):
                if not np.any(np.all(chosen == points[idx], axis=1)):
                    centers[c] = points[idx]
                    break
            d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
            continue
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        idx = min(idx, n - 1)
        centers[c] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def lloyd(
    points: np.ndarray,
    centers: np.ndarray,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KMeansResult:
    """Alternate assignment and mean updates until centers stop moving.

    An empty cluster is repaired by stealing the point currently farthest
    from its assigned center (smallest index on ties).
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float).copy()
    k = centers.shape[0]
    history: list[float] = []
    labels, d2 = _assign(points, centers)
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        inertia = float(d2[np.arange(points.shape[0]), labels].sum())
        history.append(inertia)
        new_centers = centers.copy()
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] > 0:
                new_centers[c] = points[labels == c].mean(axis=0)
        # empty-cluster repair: relocate onto the farthest-out point
        taken: set[int] = set()
        for c in range(k):
            if counts[c] == 0:
                dist_to_own = d2[np.arange(points.shape[0]), labels].copy()
                for t in taken:
                    dist_to_own[t] = -1.0
                j = int(np.argmax(dist_to_own))
                new_centers[c] = points[j]
                taken.add(j)
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        labels, d2 = _assign(points, centers)
        if shift < tol:
            break
    inertia = float(d2[np.arange(points.shape[0]), labels].sum())
    return KMeansResult(
        centers=centers,
        labels=labels,
        inertia=inertia,
        iterations=iterations,
        inertia_history=tuple(history),
    )


def kmeans(points: np.ndarray, k: int, seed: int, max_iter: int = 300, tol: float = 1e-6) -> KMeansResult:
    """kmeans++ seeding followed by Lloyd refinement."""
    return lloyd(points, kmeanspp_init(points, k, seed), max_iter=max_iter, tol=tol)
