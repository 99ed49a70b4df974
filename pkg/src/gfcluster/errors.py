"""Exception types shared across the pipeline."""


class GFClusterError(Exception):
    """Base class for all pipeline errors."""


class ZeroDegree(GFClusterError):
    """A node has degree zero; normalization is undefined."""

    def __init__(self, node: int):
        self.node = node
        super().__init__(f"node {node} has zero degree; add self-loops first")


class EmptyEdgeSet(GFClusterError):
    """An operation requiring edges was given a graph with none."""


class NotSymmetric(GFClusterError):
    """A matrix expected to be symmetric is not, within tolerance."""


class DimensionTooLarge(GFClusterError):
    """A dense oracle path was asked to handle a matrix above its cap."""


class SizeMismatch(GFClusterError):
    """On-disk payload size or spatial dimensions disagree with the declaration."""


class UnsupportedDtype(GFClusterError):
    """A sidecar declares a dtype this reader does not handle."""


class MalformedSidecar(GFClusterError):
    """A sidecar file is missing fields or cannot be parsed."""


class TooManySuperpixels(GFClusterError):
    """Requested more superpixels than there are pixels."""


class TooFewDistinctPoints(GFClusterError):
    """K-means++ needs at least K distinct points."""


class EmptyTable(GFClusterError):
    """A contingency table with no entries cannot be matched."""


class NoLabeledPixels(GFClusterError):
    """Metric evaluation requires at least one labeled pixel."""


class EditConflict(GFClusterError):
    """An edge pair appears in both the recovery and removal sets."""


class NonFiniteGradient(GFClusterError):
    """A gradient component became NaN or infinite."""


class ConfigInvalid(GFClusterError):
    """A configuration value violates its documented range."""
