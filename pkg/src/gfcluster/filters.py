"""Adaptive low/high-pass graph filtering and the linear node embedding.

One filter layer mixes a k-step smoothing operator with its complementary
sharpening operator, mu*S^k + (1-mu)*(I-S)^k, where S is the row-stochastic
normalized adjacency. Layers are applied as repeated sparse products against
the (N x D) signal; the N x N operator is never materialized on the runtime
path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionTooLarge
from .graph_core import ORACLE_CAP, NormalizedOperators


_MU_CLAMP = 1e-12


def logistic(x: float) -> float:
    # clamped away from {0, 1} so the mix coefficient stays strictly inside
    # the open interval even when float rounding saturates exp
    if x >= 0:
        v = 1.0 / (1.0 + math.exp(-x))
    else:
        e = math.exp(x)
        v = e / (1.0 + e)
    return min(max(v, _MU_CLAMP), 1.0 - _MU_CLAMP)


@dataclass(frozen=True)
class FilterParams:
    """Filter mix and stacking configuration.

    ``mu_raw`` is unconstrained; the mix coefficient is logistic(mu_raw), so
    it stays inside (0, 1) under any gradient update. ``fixed_mu`` pins the
    coefficient instead (used by the pure-low-pass ablation) and disables its
    gradient.
    """

    mu_raw: float = 0.0
    k: int = 1
    t_layers: int = 1
    fixed_mu: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("filter order k must be >= 1")
        if self.t_layers < 1:
            raise ValueError("stack depth must be >= 1")

    @property
    def mu(self) -> float:
        if self.fixed_mu is not None:
            return self.fixed_mu
        return logistic(self.mu_raw)


def _mix_apply(
    smooth: Callable[[np.ndarray], np.ndarray], m: np.ndarray, mu: float, k: int
) -> np.ndarray:
    """One filter layer: mu*S^k m + (1-mu)*(I-S)^k m via k applications of S."""
    low = m
    for _ in range(k):
        low = smooth(low)
    high = m
    for _ in range(k):
        high = high - smooth(high)
    return mu * low + (1.0 - mu) * high


def _mix_derivative(
    smooth: Callable[[np.ndarray], np.ndarray], m: np.ndarray, k: int
) -> np.ndarray:
    """d/d(mu) of one layer applied to m: S^k m - (I-S)^k m."""
    low = m
    for _ in range(k):
        low = smooth(low)
    high = m
    for _ in range(k):
        high = high - smooth(high)
    return low - high


def apply_adaptive_filter(
    ops: NormalizedOperators, fp: FilterParams, m: np.ndarray
) -> np.ndarray:
    """Apply one adaptive filter layer to an N x D signal."""
    return _mix_apply(lambda y: ops.a_rw @ y, np.asarray(m, dtype=float), fp.mu, fp.k)


def apply_filter_stack(
    ops: NormalizedOperators, fp: FilterParams, x: np.ndarray
) -> np.ndarray:
    """Apply ``t_layers`` successive adaptive filter layers."""
    out = np.asarray(x, dtype=float)
    for _ in range(fp.t_layers):
        out = apply_adaptive_filter(ops, fp, out)
    return out


def filter_stack_intermediates(
    ops: NormalizedOperators, fp: FilterParams, x: np.ndarray
) -> list[np.ndarray]:
    """All stack states [x, F x, ..., F^t x]; the backward pass needs each."""
    ys = [np.asarray(x, dtype=float)]
    for _ in range(fp.t_layers):
        ys.append(apply_adaptive_filter(ops, fp, ys[-1]))
    return ys


def row_normalize(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """L2-normalize rows; zero rows stay zero. Returns (normalized, norms)."""
    norms = np.linalg.norm(z, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    return z / safe[:, None], norms


def row_normalize_backward(
    z0: np.ndarray, z: np.ndarray, norms: np.ndarray, grad_z: np.ndarray
) -> np.ndarray:
    """Backpropagate through row normalization (zero rows pass zero gradient)."""
    safe = np.where(norms > 0, norms, 1.0)
    inner = np.sum(grad_z * z, axis=1, keepdims=True)
    grad = (grad_z - inner * z) / safe[:, None]
    grad[norms == 0] = 0.0
    return grad


def encode(
    ops: NormalizedOperators,
    fp: FilterParams,
    x: np.ndarray,
    w: np.ndarray,
    normalize_rows: bool = True,
) -> np.ndarray:
    """Embed node features: Z = (filter stack applied to X) @ W, rows optionally unit-norm."""
    xs = apply_filter_stack(ops, fp, x)
    z = xs @ w
    if normalize_rows:
        z, _ = row_normalize(z)
    return z


def dense_stack_operator(
    a: np.ndarray, fp: FilterParams, cap: int = ORACLE_CAP
) -> np.ndarray:
    """Materialize the stacked filter operator F^t on a dense normalized adjacency.

    Oracle path for small graphs: runs the identity matrix through the same
    layer code as the sparse runtime.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n > cap:
        raise DimensionTooLarge(f"dense operator assembly capped at {cap} nodes")
    out = np.eye(n)
    for _ in range(fp.t_layers):
        out = _mix_apply(lambda y: a @ y, out, fp.mu, fp.k)
    return out
