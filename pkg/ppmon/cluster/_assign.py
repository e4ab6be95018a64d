from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from ._dbscan import DbscanClusters
from ._distance import edit_distances_to
from ._model_based import ModelBasedClusters
from .exceptions import ClusteringParameterError


@dataclass(frozen=True)
class ClusterAssignment:
    cluster_id: int
    distance: float


def assign_model_based(
    clusters: ModelBasedClusters, vector: Sequence[float] | np.ndarray
) -> ClusterAssignment:
    """The cluster whose mean is nearest in Euclidean distance.

    Ties go to the lowest cluster id.
    """
    x = np.asarray(vector, dtype=np.float64)
    distances = np.sqrt(((clusters.means - x) ** 2).sum(axis=1))
    best = int(np.argmin(distances))
    return ClusterAssignment(best, float(distances[best]))


def assign_dbscan(
    clusters: DbscanClusters, sequence: Sequence[Hashable]
) -> ClusterAssignment:
    """The cluster of the nearest clustered training sequence.

    Noise sequences are never assignment targets. Among equally near
    sequences the lowest cluster id wins.
    """
    labels, codes = clusters.member_codes()
    if not len(labels):
        raise ClusteringParameterError(
            "Cannot assign to DBSCAN clusters made only of noise."
        )
    distances = edit_distances_to(sequence, codes)
    nearest = distances.min()
    best = int(labels[distances == nearest].min())
    return ClusterAssignment(best, float(nearest))
