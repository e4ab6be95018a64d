from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ppmon.cluster import (
    ClusterAssignment,
    DbscanClusters,
    ModelBasedClusters,
    assign_dbscan,
    assign_model_based,
)
from ppmon.encoding import encode_frequency
from ppmon.log import AttributeType, DataSnapshot, Event, Trace, snapshot_at
from ppmon.tree import DecisionTree, Prediction, RandomForest

from ._config import TrainingConfig

Classifier = Union[DecisionTree, RandomForest]


@dataclass(frozen=True)
class ClusterStats:
    """Training rows of one cluster and their label balance."""

    cluster_id: int
    rows: int
    compliant: int
    non_compliant: int


@dataclass
class PredictiveModel:
    """A trained model: the clusters of the training prefixes and one
    classifier per cluster.

    Attributes
    ----------
    version : str
        ppmon version that trained the model.

    alphabet : tuple of str
        Sorted activities of the training log.

    attribute_schema : dict of str to AttributeType
        Attributes of the training log.

    formula : str or None
        Text of the monitored predicate; ``None`` if a custom labeler was used.

    config : TrainingConfig
        The configuration the model was trained with.

    clusters : ModelBasedClusters or DbscanClusters
        Clusters of the training prefixes; ``clusters.labels`` follows the
        order of the training prefixes.

    classifiers : dict of int to DecisionTree or RandomForest
        Classifier of every cluster that has training rows.

    stats : list of ClusterStats
        Per cluster row counts, in cluster order.

    n_prefixes : int
        Number of training prefixes, noise included.

    n_noise : int
        Training prefixes left out as DBSCAN noise.

    init_time_ms : float
        Wall clock time of the training.
    """

    version: str
    alphabet: Tuple[str, ...]
    attribute_schema: Dict[str, AttributeType]
    formula: Optional[str]
    config: TrainingConfig
    clusters: Union[ModelBasedClusters, DbscanClusters]
    classifiers: Dict[int, Classifier]
    stats: List[ClusterStats] = field(default_factory=list)
    n_prefixes: int = 0
    n_noise: int = 0
    init_time_ms: float = 0.0

    @property
    def instance(self) -> str:
        return self.config.instance

    @property
    def n_clusters(self) -> int:
        if isinstance(self.clusters, DbscanClusters):
            return self.clusters.n_clusters
        return self.clusters.k

    def assign(self, prefix: Union[Trace, Sequence[Event]]) -> ClusterAssignment:
        """Cluster of a running prefix, using its whole control flow."""
        activities = _activities(prefix)
        if isinstance(self.clusters, DbscanClusters):
            return assign_dbscan(self.clusters, activities)
        return assign_model_based(
            self.clusters, encode_frequency(activities, self.alphabet)
        )

    def snapshot(self, prefix: Union[Trace, Sequence[Event]]) -> DataSnapshot:
        """Data snapshot after the last event of a running prefix."""
        trace = prefix if isinstance(prefix, Trace) else Trace("", tuple(prefix))
        return snapshot_at(trace, len(trace), self.attribute_schema)

    def predict(
        self, prefix: Union[Trace, Sequence[Event]]
    ) -> Tuple[ClusterAssignment, Optional[Prediction]]:
        """Assign a non-empty running prefix to its cluster and query that
        cluster's classifier with the current data snapshot.

        The prediction is ``None`` if the cluster has no classifier.
        """
        assignment = self.assign(prefix)
        classifier = self.classifiers.get(assignment.cluster_id)
        if classifier is None:
            return assignment, None
        return assignment, classifier.predict(self.snapshot(prefix))


def _activities(prefix: Union[Trace, Sequence[Event]]) -> Tuple[str, ...]:
    if isinstance(prefix, Trace):
        return prefix.activities
    return tuple(event.activity for event in prefix)
