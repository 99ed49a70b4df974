"""Graph representation, normalization algebra, homophily, and the dense spectral oracle.

The graph is stored as an upper-triangular coordinate list (i < j) plus a
separate self-loop weight vector, so symmetry holds by construction and
self-loops can be preserved or excluded without bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    DimensionTooLarge,
    EmptyEdgeSet,
    NotSymmetric,
    ZeroDegree,
)

ORACLE_CAP = 64


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with optional node features.

    ``rows[e] < cols[e]`` for every stored edge; each undirected edge appears
    exactly once. ``self_loops[i]`` is the weight of the loop at node i
    (0 means absent).
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    self_loops: np.ndarray
    features: np.ndarray | None = None

    @property
    def num_edges(self) -> int:
        """Number of off-diagonal undirected edges (each counted once)."""
        return int(self.rows.shape[0])

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.rows.tolist(), self.cols.tolist()))

    def degrees(self) -> np.ndarray:
        """Weighted degree of every node, self-loops included."""
        d = self.self_loops.astype(float).copy()
        np.add.at(d, self.rows, self.weights)
        np.add.at(d, self.cols, self.weights)
        return d

    def adjacency_csr(self) -> sp.csr_matrix:
        """Full symmetric adjacency (both triangles plus the diagonal)."""
        i = np.concatenate([self.rows, self.cols, np.arange(self.n)])
        j = np.concatenate([self.cols, self.rows, np.arange(self.n)])
        w = np.concatenate([self.weights, self.weights, self.self_loops])
        return sp.csr_matrix((w, (i, j)), shape=(self.n, self.n))

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.rows, self.cols] = self.weights
        a[self.cols, self.rows] = self.weights
        a[np.arange(self.n), np.arange(self.n)] = self.self_loops
        return a


def make_graph(
    n: int,
    edges: np.ndarray | list[tuple[int, int, float]],
    self_loops: np.ndarray | None = None,
    features: np.ndarray | None = None,
) -> Graph:
    """Build a :class:`Graph` from (i, j, w) triples, canonicalizing order.

    Triples may use either orientation; they are mapped to i < j, sorted,
    and checked for duplicates, non-finite values, and negative weights.
    """
    if len(edges) == 0:
        rows = np.zeros(0, dtype=np.int64)
        cols = np.zeros(0, dtype=np.int64)
        weights = np.zeros(0, dtype=float)
    else:
        arr = np.asarray(edges, dtype=float)
        i = arr[:, 0].astype(np.int64)
        j = arr[:, 1].astype(np.int64)
        w = arr[:, 2].astype(float)
        if np.any(i == j):
            raise ValueError("self-loops must go in the self_loops vector, not the edge list")
        rows = np.minimum(i, j)
        cols = np.maximum(i, j)
        order = np.lexsort((cols, rows))
        rows, cols, weights = rows[order], cols[order], w[order]
        if rows.shape[0] > 1:
            same = (np.diff(rows) == 0) & (np.diff(cols) == 0)
            if np.any(same):
                k = int(np.argmax(same))
                raise ValueError(f"duplicate edge ({rows[k]}, {cols[k]})")
    if rows.size and (rows.min() < 0 or cols.max() >= n):
        raise ValueError("edge endpoint out of range")
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise ValueError("edge weights must be finite and non-negative")
    if self_loops is None:
        self_loops = np.zeros(n, dtype=float)
    else:
        self_loops = np.asarray(self_loops, dtype=float).copy()
        if self_loops.shape != (n,):
            raise ValueError("self_loops must have length n")
        if not np.all(np.isfinite(self_loops)) or np.any(self_loops < 0):
            raise ValueError("self-loop weights must be finite and non-negative")
    if features is not None:
        features = np.asarray(features, dtype=float)
        if features.shape[0] != n:
            raise ValueError("features must have one row per node")
        features = _freeze(features.copy())
    return Graph(
        n=n,
        rows=_freeze(rows),
        cols=_freeze(cols),
        weights=_freeze(weights),
        self_loops=_freeze(self_loops),
        features=features,
    )


def add_self_loops(g: Graph, w: float = 1.0) -> Graph:
    """Raise every self-loop weight to at least ``w``; edges untouched."""
    if w < 0:
        raise ValueError("self-loop weight must be non-negative")
    loops = np.maximum(g.self_loops, w)
    return Graph(
        n=g.n,
        rows=g.rows,
        cols=g.cols,
        weights=g.weights,
        self_loops=_freeze(loops),
        features=g.features,
    )


@dataclass(frozen=True)
class NormalizedOperators:
    """Row-stochastic smoothing operator D^-1 A and its complement I - D^-1 A."""

    a_rw: sp.csr_matrix
    l_rw: sp.csr_matrix
    degrees: np.ndarray


def normalize(g: Graph) -> NormalizedOperators:
    """Degree-normalize the adjacency into the row-stochastic pair (A_rw, L_rw).

    Every node must have positive degree; run :func:`add_self_loops` first on
    graphs that may contain isolated nodes.
    """
    d = g.degrees()
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise ZeroDegree(int(zero[0]))
    a = g.adjacency_csr()
    a_rw = sp.diags(1.0 / d) @ a
    a_rw = sp.csr_matrix(a_rw)
    l_rw = sp.csr_matrix(sp.identity(g.n, format="csr") - a_rw)
    return NormalizedOperators(a_rw=a_rw, l_rw=l_rw, degrees=d)


def sym_normalized_adjacency(g: Graph) -> np.ndarray:
    """Dense D^-1/2 A D^-1/2, sharing the spectrum of A_rw.

    Oracle path only: being symmetric it feeds
    :func:`symmetric_eigendecompose` directly.
    """
    d = g.degrees()
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise ZeroDegree(int(zero[0]))
    inv_sqrt = 1.0 / np.sqrt(d)
    return inv_sqrt[:, None] * g.to_dense() * inv_sqrt[None, :]


def edge_homophily(g: Graph, labels: np.ndarray) -> float:
    """Fraction of off-diagonal edges whose endpoints share a label."""
    labels = np.asarray(labels)
    if labels.shape != (g.n,):
        raise ValueError("labels must have one entry per node")
    if g.num_edges == 0:
        raise EmptyEdgeSet("homophily is undefined on a graph with no edges")
    same = labels[g.rows] == labels[g.cols]
    return float(np.count_nonzero(same)) / g.num_edges


def sbm_generate(
    sizes: list[int],
    p_in: float,
    p_out: float,
    feature_means: np.ndarray,
    noise_sigma: float,
    seed: int,
) -> tuple[Graph, np.ndarray]:
    """Stochastic block model with Gaussian node features around block means.

    Deterministic given ``seed``. Edge weights are 1.0.
    """
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise ValueError("need 0 <= p_out <= p_in <= 1")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    feature_means = np.asarray(feature_means, dtype=float)
    if feature_means.shape[0] != len(sizes):
        raise ValueError("one feature mean per block required")
    n = int(sum(sizes))
    labels = np.repeat(np.arange(len(sizes)), sizes)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], p_in, p_out)
    keep = rng.random(iu.shape[0]) < prob
    edges = np.column_stack([iu[keep], ju[keep], np.ones(int(keep.sum()))])
    feats = feature_means[labels] + noise_sigma * rng.standard_normal(
        (n, feature_means.shape[1])
    )
    return make_graph(n, edges, features=feats), labels


def symmetric_eigendecompose(
    m: np.ndarray, cap: int = ORACLE_CAP
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a dense symmetric matrix.

    Dense oracle: refuses matrices above ``cap`` and asymmetric input.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if m.shape[0] > cap:
        raise DimensionTooLarge(f"dimension {m.shape[0]} exceeds oracle cap {cap}")
    if m.size and np.max(np.abs(m - m.T)) > 1e-10:
        raise NotSymmetric("matrix is not symmetric within 1e-10")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def filter_spectral_response(mu: float, k: int, lambdas: np.ndarray) -> np.ndarray:
    """Frequency response mu*(1-lam)^k + (1-mu)*lam^k of the mixed filter."""
    if k < 1:
        raise ValueError("filter order k must be >= 1")
    lam = np.asarray(lambdas, dtype=float)
    return mu * (1.0 - lam) ** k + (1.0 - mu) * lam**k


# line-oriented text format: "n <N>" header, then one "e <i> <j> <w>" per edge;
# self-loops serialize as e i i w


def save_graph(g: Graph, path) -> None:
    lines = [f"n {g.n}"]
    for i, j, w in zip(g.rows.tolist(), g.cols.tolist(), g.weights.tolist()):
        lines.append(f"e {i} {j} {w!r}")
    for i in range(g.n):
        if g.self_loops[i] != 0.0:
            lines.append(f"e {i} {i} {float(g.self_loops[i])!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> Graph:
    n = None
    edges: list[tuple[int, int, float]] = []
    loops: dict[int, float] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "n":
                n = int(parts[1])
            elif parts[0] == "e":
                i, j, w = int(parts[1]), int(parts[2]), float(parts[3])
                if i == j:
                    loops[i] = loops.get(i, 0.0) + w
                else:
                    edges.append((i, j, w))
            else:
                raise ValueError(f"unrecognized record {parts[0]!r}")
    if n is None:
        raise ValueError("missing 'n' header")
    self_loops = np.zeros(n)
    for i, w in loops.items():
        self_loops[i] = w
    return make_graph(n, edges, self_loops=self_loops)


def save_labels(labels: np.ndarray, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for v in np.asarray(labels).ravel():
            fh.write(f"{int(v)}\n")


def load_labels(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
