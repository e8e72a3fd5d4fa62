# percolation/__init__.py

from .clusters import ClusterReport, label_clusters
from .crossing import CrossingDirection, CrossingSamples, crossing, crossing_samples
from .finite_size import Decision, FiniteSizeDecision, finite_size_check
from .scan import h_perc_scan, percolation_threshold_scan
from .tails import TailClass, TailEstimate, tail_estimate

__all__ = [
    "ClusterReport", "label_clusters",
    "CrossingDirection", "CrossingSamples", "crossing", "crossing_samples",
    "Decision", "FiniteSizeDecision", "finite_size_check",
    "h_perc_scan", "percolation_threshold_scan",
    "TailClass", "TailEstimate", "tail_estimate",
]
