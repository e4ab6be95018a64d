from __future__ import annotations

import logging
from typing import Dict, Hashable, List, Optional, Sequence, Set, Tuple

import numpy as np
from sklearn.cluster import DBSCAN

from ._distance import SequenceCodes, pairwise_edit_distances
from .exceptions import ClusteringParameterError

logger = logging.getLogger(__name__)

Sequence_ = Tuple[Hashable, ...]


class DbscanClusters:
    """Density-based clusters of label sequences.

    The distinct training sequences are kept verbatim, together with their
    cluster (``-1`` for noise), since assigning a new sequence means finding
    the nearest clustered one.

    Attributes
    ----------
    eps : float
        Neighbourhood radius in normalized edit distance.

    min_points : int
        Number of sequences, itself included, within ``eps`` that makes a
        sequence a core point.

    sequences : list of tuple
        Distinct training sequences, in order of first appearance.

    sequence_labels : list of int
        Cluster of every entry of ``sequences``.

    labels : numpy.ndarray of shape (n,)
        Cluster of every training sequence.
    """

    def __init__(
        self,
        eps: float,
        min_points: int,
        sequences: List[Sequence_],
        sequence_labels: List[int],
        labels: np.ndarray,
    ) -> None:
        self.eps = eps
        self.min_points = min_points
        self.sequences = sequences
        self.sequence_labels = sequence_labels
        self.labels = labels
        self._member_codes: Optional[Tuple[np.ndarray, SequenceCodes]] = None

    def __getstate__(self) -> dict:
        state = self.__dict__.copy()
        state["_member_codes"] = None
        return state

    def member_codes(self) -> Tuple[np.ndarray, SequenceCodes]:
        """Cluster ids and encoded sequences of the clustered (non-noise)
        training sequences, built on first use."""
        if self._member_codes is None:
            members = [
                (label, sequence)
                for sequence, label in zip(self.sequences, self.sequence_labels)
                if label >= 0
            ]
            labels = np.array([label for label, _ in members], dtype=np.int64)
            self._member_codes = (labels, SequenceCodes([s for _, s in members]))
        return self._member_codes

    @property
    def n_clusters(self) -> int:
        return max(self.sequence_labels, default=-1) + 1

    @property
    def clusters(self) -> List[Set[Sequence_]]:
        """Distinct member sequences of every cluster."""
        result: List[Set[Sequence_]] = [set() for _ in range(self.n_clusters)]
        for sequence, label in zip(self.sequences, self.sequence_labels):
            if label >= 0:
                result[label].add(sequence)
        return result

    @property
    def noise(self) -> Set[Sequence_]:
        return {
            s for s, label in zip(self.sequences, self.sequence_labels) if label < 0
        }

    @property
    def n_noise(self) -> int:
        """Number of training sequences, with repetitions, left as noise."""
        return int((self.labels < 0).sum())

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster_id)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(eps={self.eps}, min_points={self.min_points}, "
            f"n_clusters={self.n_clusters})"
        )


def cluster_dbscan(
    sequences: Sequence[Sequence[Hashable]],
    eps: float = 0.125,
    min_points: int = 4,
    n_jobs: Optional[int] = None,
) -> DbscanClusters:
    """Cluster sequences with DBSCAN under normalized edit distance.

    Border sequences reachable from several clusters join the cluster found
    first, clusters being grown from core sequences in input order.

    Parameters
    ----------
    sequences : sequence of sequences
        Label sequences, e.g. prefixes as lists of activities.

    eps : float, default=0.125
        Neighbourhood radius; ``eps >= 1`` makes every pair neighbours.

    min_points : int, default=4
        Minimum neighbourhood size of a core sequence, itself included.

    n_jobs : int, default=None
        Threads used for the distance matrix.

    Returns
    -------
    clusters : DbscanClusters
    """
    if not eps > 0:
        raise ClusteringParameterError(f"eps must be positive, got {eps}.")
    if (
        isinstance(min_points, bool)
        or not isinstance(min_points, int)
        or min_points < 1
    ):
        raise ClusteringParameterError(
            f"min_points must be a positive integer, got {min_points!r}."
        )

    # identical sequences are at distance 0, so cluster the distinct ones
    # weighted by their count
    index: Dict[Sequence_, int] = {}
    inverse = np.array(
        [index.setdefault(tuple(s), len(index)) for s in sequences], dtype=np.int64
    )
    distinct = list(index)
    if not distinct:
        return DbscanClusters(eps, min_points, [], [], np.zeros(0, dtype=np.int64))

    counts = np.bincount(inverse, minlength=len(distinct))
    distances = pairwise_edit_distances(distinct, n_jobs=n_jobs)
    estimator = DBSCAN(eps=eps, min_samples=min_points, metric="precomputed")
    estimator.fit(distances, sample_weight=counts)
    distinct_labels = [int(label) for label in estimator.labels_]

    clusters = DbscanClusters(
        eps=eps,
        min_points=min_points,
        sequences=distinct,
        sequence_labels=distinct_labels,
        labels=np.asarray(distinct_labels, dtype=np.int64)[inverse],
    )
    logger.info(
        f"DBSCAN found {clusters.n_clusters} clusters in {len(inverse)} sequences "
        f"({len(distinct)} distinct)."
    )
    if clusters.n_noise:
        logger.warning(
            f"{clusters.n_noise} sequences are noise and belong to no cluster."
        )
    return clusters
