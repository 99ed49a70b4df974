"""Homophily-guided graph rewiring: confident subsets, edge recovery and removal.

Edits are hard and discrete. Recovery adds the highest-similarity non-edges
inside each pseudo-cluster's confident subset; removal drops the
lowest-similarity existing edges whose endpoints disagree on pseudo-label.
All rankings carry explicit tie-breaks so identical inputs always produce
identical edit sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EditConflict
from .graph_core import Graph, make_graph

# ceil/floor budgets computed from float ratios get a tiny nudge so that an
# exactly-integral product is not pushed over a rounding boundary
_EPS = 1e-9


def _ceil(x: float) -> int:
    return int(math.ceil(x - _EPS))


def _floor(x: float) -> int:
    return int(math.floor(x + _EPS))


@dataclass(frozen=True)
class ConfidentSubsets:
    """Per-cluster node indices kept for similarity estimation."""

    members: tuple[tuple[int, ...], ...]
    gamma: float

    def size(self, k: int) -> int:
        return len(self.members[k])


@dataclass(frozen=True)
class EdgeEditSet:
    recover: tuple[tuple[int, int], ...]
    remove: tuple[tuple[int, int], ...]
    recover_budgets: tuple[int, ...]
    remove_budget: int


@dataclass(frozen=True)
class UpdatedAdjacency:
    graph: Graph
    removed: int
    recovered: int


def confident_subsets(q: np.ndarray, c: np.ndarray, gamma: float) -> ConfidentSubsets:
    """Top ceil(gamma * cluster size) nodes of each cluster by assignment
    probability (at least one per nonempty cluster; ties to the lower index)."""
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must lie in (0, 1]")
    n_clusters = q.shape[1]
    members: list[tuple[int, ...]] = []
    for k in range(n_clusters):
        nodes = np.flatnonzero(c == k)
        if nodes.size == 0:
            members.append(())
            continue
        take = min(max(1, _ceil(gamma * nodes.size)), nodes.size)
        order = sorted(nodes.tolist(), key=lambda i: (-q[i, k], i))
        members.append(tuple(order[:take]))
    return ConfidentSubsets(members=tuple(members), gamma=gamma)


def similarity_full(z: np.ndarray) -> np.ndarray:
    """Dot-product similarity of every node pair, S = Z Z^T."""
    z = np.asarray(z, dtype=float)
    return z @ z.T


def similarity_within(z: np.ndarray, subset) -> np.ndarray:
    """Similarity restricted to a node subset, computed on the sub-block only."""
    idx = np.asarray(list(subset), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("subset must be nonempty")
    zs = np.asarray(z, dtype=float)[idx]
    return zs @ zs.T


def edge_similarities(z: np.ndarray, g: Graph) -> np.ndarray:
    """z_i . z_j for every stored edge; avoids the full N x N product."""
    z = np.asarray(z, dtype=float)
    return np.sum(z[g.rows] * z[g.cols], axis=1)


def recover_edges(
    z: np.ndarray,
    subsets: ConfidentSubsets,
    g: Graph,
    xi: float,
) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...]]:
    """Per-cluster intra-cluster non-edges ranked by similarity, capped by
    floor(xi * |E| * N_k / N) where N_k is the confident-subset size.

    Existing edges and self-pairs never enter the ranking. Returns the union
    of per-cluster selections and the per-cluster budgets.
    """
    if not (0.0 <= xi <= 1.0):
        raise ValueError("xi must lie in [0, 1]")
    existing = g.edge_set()
    m = g.num_edges
    selected: list[tuple[int, int]] = []
    budgets: list[int] = []
    for members in subsets.members:
        nk = len(members)
        budget = _floor(xi * m * nk / g.n) if nk else 0
        budgets.append(budget)
        if budget == 0 or nk < 2:
            continue
        sub = similarity_within(z, members)
        candidates: list[tuple[float, int, int]] = []
        for a in range(nk):
            for b in range(a + 1, nk):
                i, j = members[a], members[b]
                if i > j:
                    i, j = j, i
                if (i, j) in existing:
                    continue
                candidates.append((sub[a, b], i, j))
        candidates.sort(key=lambda t: (-t[0], t[1], t[2]))
        selected.extend((i, j) for _, i, j in candidates[:budget])
    return tuple(sorted(set(selected))), tuple(budgets)


def remove_edges(
    z: np.ndarray,
    c: np.ndarray,
    g: Graph,
    eta: float,
) -> tuple[tuple[int, int], ...]:
    """Drop the lowest-similarity eta fraction of existing edges whose
    endpoints lie in different pseudo-clusters.

    All edges are ranked together (descending similarity, ties by pair); the
    cross-cluster filter applies after the rank cut, so the removed count can
    undershoot the eta budget but never exceed it. Self-loops are untouched.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValueError("eta must lie in [0, 1]")
    m = g.num_edges
    if m == 0 or eta == 0.0:
        return ()
    sims = edge_similarities(z, g)
    order = sorted(range(m), key=lambda e: (-sims[e], int(g.rows[e]), int(g.cols[e])))
    cut = _ceil((1.0 - eta) * m)
    out = []
    for pos in range(cut, m):
        e = order[pos]
        i, j = int(g.rows[e]), int(g.cols[e])
        if c[i] != c[j]:
            out.append((i, j))
    return tuple(sorted(out))


def update_adjacency(
    g: Graph,
    edits: EdgeEditSet,
    x: np.ndarray | None = None,
    rho: float = 0.2,
) -> UpdatedAdjacency:
    """Apply the edit set: delete removals, insert recoveries, keep self-loops.

    A recovered edge gets weight exp(-rho * ||x_i - x_j||^2) from node
    features, or 1.0 when no features are supplied.
    """
    rc = set(edits.recover)
    rm = set(edits.remove)
    clash = rc & rm
    if clash:
        raise EditConflict(f"pairs in both edit sets: {sorted(clash)[:3]}")
    existing = g.edge_set()
    if not rm <= existing:
        raise EditConflict("removal set contains a non-edge")
    if rc & existing:
        raise EditConflict("recovery set contains an existing edge")
    keep = [
        (int(i), int(j), float(w))
        for i, j, w in zip(g.rows, g.cols, g.weights)
        if (int(i), int(j)) not in rm
    ]
    for i, j in sorted(rc):
        if x is None:
            w = 1.0
        else:
            w = float(np.exp(-rho * np.sum((x[i] - x[j]) ** 2)))
        keep.append((i, j, w))
    new_graph = make_graph(
        g.n, keep, self_loops=g.self_loops.copy(), features=g.features
    )
    return UpdatedAdjacency(graph=new_graph, removed=len(rm), recovered=len(rc))


def reconstruction_loss(z: np.ndarray, g: Graph, mean_form: bool = True) -> float:
    """|| Z Z^T - A ||_F^2, divided by N^2 unless the raw sum form is requested.

    Expanded as ||Z^T Z||_F^2 - 2 sum_A A_ij (z_i . z_j) + ||A||_F^2 so no
    N x N product is formed.
    """
    z = np.asarray(z, dtype=float)
    gram = z.T @ z
    zz_sq = float(np.sum(gram**2))
    edge_dots = np.sum(z[g.rows] * z[g.cols], axis=1)
    diag_dots = np.sum(z**2, axis=1)
    cross = 2.0 * float(np.sum(g.weights * edge_dots)) + float(
        np.sum(g.self_loops * diag_dots)
    )
    a_sq = 2.0 * float(np.sum(g.weights**2)) + float(np.sum(g.self_loops**2))
    total = zz_sq - 2.0 * cross + a_sq
    if mean_form:
        return total / float(g.n) ** 2
    return total


def rewire(
    z: np.ndarray,
    q: np.ndarray,
    c: np.ndarray,
    g: Graph,
    gamma: float,
    xi: float,
    eta: float,
    x: np.ndarray | None = None,
    rho: float = 0.2,
) -> tuple[EdgeEditSet, UpdatedAdjacency]:
    """One full structure-learning pass over the current graph."""
    subsets = confident_subsets(q, c, gamma)
    recover, budgets = recover_edges(z, subsets, g, xi)
    remove = remove_edges(z, c, g, eta)
    edits = EdgeEditSet(
        recover=recover,
        remove=remove,
        recover_budgets=budgets,
        remove_budget=_ceil(eta * g.num_edges),
    )
    return edits, update_adjacency(g, edits, x=x, rho=rho)
