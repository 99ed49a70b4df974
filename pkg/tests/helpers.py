"""Shared fixtures and independent oracles for the test suite.

Everything here is deliberately naive (dense matrices, explicit loops,
exhaustive enumeration) so it can arbitrate the production code paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from gfcluster.graph_core import Graph, make_graph


def random_connected_graph(n: int, rng: np.random.Generator, extra_edge_prob: float = 0.3,
                           with_features: int | None = None) -> Graph:
    """Random spanning tree plus extra edges; connected by construction."""
    edges = {}
    for i in range(1, n):
        j = int(rng.integers(i))
        edges[(j, i)] = float(rng.uniform(0.2, 1.0))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges[(i, j)] = float(rng.uniform(0.2, 1.0))
    feats = None
    if with_features is not None:
        feats = rng.standard_normal((n, with_features))
    return make_graph(n, [(i, j, w) for (i, j), w in edges.items()], features=feats)


def dense_rw_operator(g: Graph) -> np.ndarray:
    """Dense D^-1 A straight from the definition."""
    a = g.to_dense()
    d = a.sum(axis=1)
    return a / d[:, None]


def finite_difference(loss_fn, theta: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of a scalar function, coordinate by coordinate."""
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    flat = theta.ravel()
    gflat = grad.ravel()
    for idx in range(flat.size):
        orig = flat[idx]
        flat[idx] = orig + step
        hi = loss_fn(theta)
        flat[idx] = orig - step
        lo = loss_fn(theta)
        flat[idx] = orig
        gflat[idx] = (hi - lo) / (2.0 * step)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-3) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom))


# ---------------------------------------------------------------------------
# brute-force clustering metric oracles


def partitions_up_to_blocks(n: int, max_blocks: int) -> list[tuple[int, ...]]:
    """All partitions of n items into at most max_blocks blocks, as canonical
    restricted-growth label strings."""
    out: list[tuple[int, ...]] = []

    def grow(prefix: list[int], used: int) -> None:
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for v in range(min(used + 1, max_blocks)):
            prefix.append(v)
            grow(prefix, max(used, v + 1))
            prefix.pop()

    grow([], 0)
    return out


def brute_contingency(pred, true) -> np.ndarray:
    pred = list(pred)
    true = list(true)
    rows = sorted(set(pred))
    cols = sorted(set(true))
    table = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for p, t in zip(pred, true):
        table[rows.index(p), cols.index(t)] += 1
    return table


def brute_best_match(table: np.ndarray) -> tuple[int, dict[int, int]]:
    """Exhaustive assignment search over the zero-padded square table."""
    side = max(table.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    best, best_perm = -1, None
    for perm in itertools.permutations(range(side)):
        score = sum(padded[i, perm[i]] for i in range(side))
        if score > best:
            best, best_perm = score, perm
    mapping = {
        i: best_perm[i]
        for i in range(table.shape[0])
        if best_perm[i] < table.shape[1]
    }
    return int(best), mapping


def brute_oa(pred, true) -> float:
    table = brute_contingency(pred, true)
    matched, _ = brute_best_match(table)
    return matched / len(list(pred))


def brute_kappa(pred, true) -> float:
    table = brute_contingency(pred, true)
    n = table.sum()
    side = max(table.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    best_po, best_perm = -1.0, None
    for perm in itertools.permutations(range(side)):
        po = sum(padded[i, perm[i]] for i in range(side)) / n
        if po > best_po:
            best_po, best_perm = po, perm
    permuted = np.zeros_like(padded)
    for i in range(side):
        permuted[best_perm[i]] = padded[i]
    po = np.trace(permuted) / n
    pe = float(np.sum(permuted.sum(axis=1).astype(float) * permuted.sum(axis=0))) / n**2
    if abs(1.0 - pe) < 1e-15:
        return 1.0 if abs(po - 1.0) < 1e-15 else 0.0
    return float((po - pe) / (1.0 - pe))


def brute_nmi(pred, true) -> float:
    pred = list(pred)
    true = list(true)
    n = len(pred)
    ps = sorted(set(pred))
    ts = sorted(set(true))
    hu = 0.0
    for u in ps:
        p = pred.count(u) / n
        hu -= p * math.log(p)
    hv = 0.0
    for v in ts:
        p = true.count(v) / n
        hv -= p * math.log(p)
    if hu == 0.0 and hv == 0.0:
        return 1.0
    mi = 0.0
    for u in ps:
        for v in ts:
            joint = sum(1 for a, b in zip(pred, true) if a == u and b == v) / n
            if joint > 0:
                mi += joint * math.log(joint / ((pred.count(u) / n) * (true.count(v) / n)))
    denom = (hu + hv) / 2.0
    return mi / denom if denom > 0 else 0.0


def brute_ari(pred, true) -> float:
    """Pair counting over every item pair, definitional adjusted index."""
    pred = list(pred)
    true = list(true)
    n = len(pred)
    a = b = c = d = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_p = pred[i] == pred[j]
            same_t = true[i] == true[j]
            if same_p and same_t:
                a += 1
            elif same_p:
                b += 1
            elif same_t:
                c += 1
            else:
                d += 1
    pairs = a + b + c + d
    if pairs == 0:
        return 1.0
    expected = (a + b) * (a + c) / pairs
    max_index = (2 * a + b + c) / 2.0
    if abs(max_index - expected) < 1e-15:
        return 1.0
    return (a - expected) / (max_index - expected)


def brute_purity(pred, true) -> float:
    table = brute_contingency(pred, true)
    return float(table.max(axis=1).sum()) / table.sum()
