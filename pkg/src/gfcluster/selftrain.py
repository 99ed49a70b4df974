"""Student-t soft assignments, sharpened targets, and the KL self-training loss."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class AssignmentState:
    q: np.ndarray  # N x K soft assignments, rows sum to 1
    p: np.ndarray  # N x K target distribution, rows sum to 1
    c: np.ndarray  # length-N hard labels, argmax of q


def soft_assign(z: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Student-t kernel similarity of each embedding to each center, row-normalized.

    q_ik = (1 + ||z_i - c_k||^2)^-1 / sum_k' (1 + ||z_i - c_k'||^2)^-1
    """
    d2 = squared_distances(z, centers)
    s = 1.0 / (1.0 + d2)
    return s / s.sum(axis=1, keepdims=True)


def squared_distances(z: np.ndarray, centers: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    centers = np.asarray(centers, dtype=float)
    d2 = (
        np.sum(z**2, axis=1)[:, None]
        + np.sum(centers**2, axis=1)[None, :]
        - 2.0 * z @ centers.T
    )
    return np.maximum(d2, 0.0)


def target_distribution(q: np.ndarray) -> np.ndarray:
    """Square q and renormalize by cluster mass, then per row.

    Sharpening the assignments this way keeps large clusters from absorbing
    everything when the targets feed back into training.
    """
    if q.shape[0] == 1:
        # cluster mass equals the row itself, so q^2/f cancels to q exactly
        return q.copy()
    f = q.sum(axis=0)
    w = q**2 / f
    return w / w.sum(axis=1, keepdims=True)


def kl_loss(p: np.ndarray, q: np.ndarray) -> float:
    """sum_ik p_ik log(p_ik / q_ik); zero-probability target entries contribute 0."""
    q_safe = np.maximum(q, LOG_FLOOR)
    terms = np.where(p > 0, p * (np.log(np.maximum(p, LOG_FLOOR)) - np.log(q_safe)), 0.0)
    return float(terms.sum())


def hard_labels(q: np.ndarray) -> np.ndarray:
    """Per-row argmax of q; ties go to the smallest cluster index."""
    return np.argmax(q, axis=1)


def assignment_state(z: np.ndarray, centers: np.ndarray, p: np.ndarray | None = None) -> AssignmentState:
    q = soft_assign(z, centers)
    if p is None:
        p = target_distribution(q)
    return AssignmentState(q=q, p=p, c=hard_labels(q))
