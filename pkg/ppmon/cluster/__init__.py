from ._assign import ClusterAssignment, assign_dbscan, assign_model_based
from ._dbscan import DbscanClusters, cluster_dbscan
from ._distance import (
    edit_distance,
    edit_distance_normalized,
    edit_distances_to,
    pairwise_edit_distances,
)
from ._model_based import ModelBasedClusters, cluster_model_based, select_k_by_bic

__all__ = [
    "ClusterAssignment",
    "DbscanClusters",
    "ModelBasedClusters",
    "assign_dbscan",
    "assign_model_based",
    "cluster_dbscan",
    "cluster_model_based",
    "edit_distance",
    "edit_distance_normalized",
    "edit_distances_to",
    "pairwise_edit_distances",
    "select_k_by_bic",
]
