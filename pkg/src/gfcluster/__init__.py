"""Superpixel-graph clustering with adaptive spectral filtering and
homophily-guided graph rewiring."""

from .filters import FilterParams, apply_adaptive_filter, apply_filter_stack, encode
from .graph_core import (
    Graph,
    NormalizedOperators,
    add_self_loops,
    edge_homophily,
    filter_spectral_response,
    make_graph,
    normalize,
    sbm_generate,
    symmetric_eigendecompose,
)
from .kmeans import KMeansResult, kmeans, kmeanspp_init, lloyd
from .metrics import MetricsReport, compute_metrics, evaluate_labels, hungarian_match
from .optimize import ModelParams, TrainConfig, TrainResult, train
from .selftrain import hard_labels, kl_loss, soft_assign, target_distribution
from .structure import (
    EdgeEditSet,
    confident_subsets,
    recover_edges,
    reconstruction_loss,
    remove_edges,
    rewire,
    update_adjacency,
)

__version__ = "0.1.0"

__all__ = [
    "FilterParams",
    "Graph",
    "KMeansResult",
    "MetricsReport",
    "ModelParams",
    "NormalizedOperators",
    "TrainConfig",
    "TrainResult",
    "EdgeEditSet",
    "add_self_loops",
    "apply_adaptive_filter",
    "apply_filter_stack",
    "compute_metrics",
    "confident_subsets",
    "edge_homophily",
    "encode",
    "evaluate_labels",
    "filter_spectral_response",
    "hard_labels",
    "hungarian_match",
    "kl_loss",
    "kmeans",
    "kmeanspp_init",
    "lloyd",
    "make_graph",
    "normalize",
    "reconstruction_loss",
    "recover_edges",
    "remove_edges",
    "rewire",
    "sbm_generate",
    "soft_assign",
    "symmetric_eigendecompose",
    "target_distribution",
    "train",
    "update_adjacency",
]
