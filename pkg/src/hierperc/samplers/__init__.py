from .direct import ClusterPartition, check_budget, direct_batch, direct_levels_batch, direct_sample
from .explorer import INFINITE, ExplorationResult, explore_ball_batch, explore_batch, explore_root_cluster
from .recursive import ClusterMultiset, recursive_batch, recursive_cluster_sample

__all__ = [
    "INFINITE",
    "ClusterMultiset",
    "ClusterPartition",
    "ExplorationResult",
    "check_budget",
    "direct_batch",
    "direct_levels_batch",
    "direct_sample",
    "explore_ball_batch",
    "explore_batch",
    "explore_root_cluster",
    "recursive_batch",
    "recursive_cluster_sample",
]
