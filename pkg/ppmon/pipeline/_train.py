from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import BinaryIO, List, Mapping, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

import ppmon
from ppmon.cluster import cluster_dbscan, select_k_by_bic
from ppmon.encoding import (
    EncodedPrefix,
    FeatureVector,
    build_alphabet,
    encode_prefix,
    select_prefixes,
)
from ppmon.io import dump, load, trust_types
from ppmon.io.exceptions import CorruptModelError
from ppmon.log import AttributeType, EventLog
from ppmon.ltl import LabelingFunction, OutcomeLabel, make_labeler, parse_formula
from ppmon.tree import DecisionTree, RandomForest

from ._config import TrainingConfig
from ._model import Classifier, ClusterStats, PredictiveModel
from .exceptions import ConfigurationError, TrainingError

logger = logging.getLogger(__name__)

trust_types(PredictiveModel, TrainingConfig, ClusterStats)


def resolve_labeler(formula, labeler: Optional[LabelingFunction] = None):
    """The labeler, or the formula, given as a tree or as text, turned into
    one."""
    if labeler is not None:
        return make_labeler(labeler)
    if formula is None:
        raise ConfigurationError("Labeling traces needs a formula or a labeler.")
    if isinstance(formula, str):
        formula = parse_formula(formula)
    return make_labeler(formula)


def encode_log(
    training_log: EventLog,
    config: TrainingConfig,
    *,
    labeler: Optional[LabelingFunction] = None,
    alphabet: Optional[Sequence[str]] = None,
) -> List[EncodedPrefix]:
    """Select and encode the training prefixes of a log.

    Every prefix is labeled by its completed trace. The result follows the
    order of the traces, then of the prefix lengths.
    """
    label_of = resolve_labeler(config.formula, labeler)
    if alphabet is None:
        alphabet = build_alphabet(training_log)
    schema = list(training_log.attribute_schema)
    selection = config.prefix_selection

    prefixes = []
    for trace in training_log:
        label = label_of(trace)
        for length in select_prefixes(trace, selection):
            prefixes.append(encode_prefix(trace, length, alphabet, schema, label))
    return prefixes


def _fit_classifier(
    rows: Sequence[FeatureVector],
    config: TrainingConfig,
    schema: Mapping[str, AttributeType],
) -> Classifier:
    if config.classifier == "random_forest":
        return RandomForest(
            trees_count=config.trees_count,
            features_per_split=config.features_per_split,
            min_leaf=config.min_leaf,
            random_state=config.seed,
        ).fit(rows, schema)

    return DecisionTree(min_leaf=config.min_leaf).fit(rows, schema)


def train(
    training_log: EventLog,
    config: TrainingConfig,
    *,
    labeler: Optional[LabelingFunction] = None,
    n_jobs: Optional[int] = None,
) -> PredictiveModel:
    """Train a predictive model.

    The selected prefixes of every training trace are encoded, clustered by
    control flow and labeled by their completed trace; then one classifier is
    trained per cluster on the data snapshots of its prefixes.

    Parameters
    ----------
    training_log : EventLog
        Completed traces.

    config : TrainingConfig
        The instance and its parameters.

    labeler : callable, default=None
        Custom classification function of completed traces, returning a bool
        or an :class:`~ppmon.ltl.OutcomeLabel`. It replaces ``config.formula``.

    n_jobs : int, default=None
        Number of threads training the per cluster classifiers and computing
        edit distances.

    Returns
    -------
    model : PredictiveModel

    Raises
    ------
    TrainingError
        If the log has no traces or no prefixes, or if DBSCAN finds no cluster.
    """
    start = time.perf_counter()
    if not len(training_log):
        raise TrainingError("Cannot train on an empty log.")

    alphabet = build_alphabet(training_log)
    prefixes = encode_log(training_log, config, labeler=labeler, alphabet=alphabet)
    if not prefixes:
        raise TrainingError("The training log has no prefixes to learn from.")
    logger.info(
        f"Encoded {len(prefixes)} prefixes of {len(training_log)} traces over "
        f"{len(alphabet)} activities"
    )

    if config.clustering == "dbscan":
        clusters = cluster_dbscan(
            [prefix.sequence for prefix in prefixes],
            eps=config.eps,
            min_points=config.min_points,
            n_jobs=n_jobs,
        )
        if not clusters.n_clusters:
            raise TrainingError(
                f"no clusters: DBSCAN left all {len(prefixes)} prefixes as noise "
                f"(eps={config.eps}, min_points={config.min_points})."
            )
        n_clusters = clusters.n_clusters
    else:
        vectors = np.array([prefix.frequency for prefix in prefixes], dtype=np.float64)
        clusters = select_k_by_bic(
            vectors, k_min=config.k_min, k_max=config.k_max, seed=config.seed
        )
        n_clusters = clusters.k

    labels = np.asarray(clusters.labels)
    members = [np.flatnonzero(labels == j) for j in range(n_clusters)]
    schema = dict(training_log.attribute_schema)
    fitted = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_fit_classifier)([prefixes[i].features for i in rows], config, schema)
        for rows in members
        if len(rows)
    )
    trained_ids = [j for j, rows in enumerate(members) if len(rows)]
    classifiers = dict(zip(trained_ids, fitted))

    stats = []
    for j, rows in enumerate(members):
        n_compliant = sum(
            prefixes[i].features.label is OutcomeLabel.COMPLIANT for i in rows
        )
        stats.append(ClusterStats(j, len(rows), n_compliant, len(rows) - n_compliant))
        logger.info(
            f"Cluster {j}: {len(rows)} prefixes, {n_compliant} compliant, "
            f"{len(rows) - n_compliant} non-compliant"
        )

    n_noise = int((labels < 0).sum())
    if n_noise:
        logger.warning(f"{n_noise} noise prefixes were left out of training")

    formula_text = None
    if labeler is None and config.formula is not None:
        formula_text = str(config.formula)
    model = PredictiveModel(
        version=ppmon.__version__,
        alphabet=tuple(alphabet),
        attribute_schema=schema,
        formula=formula_text,
        config=config,
        clusters=clusters,
        classifiers=classifiers,
        stats=stats,
        n_prefixes=len(prefixes),
        n_noise=n_noise,
    )
    model.init_time_ms = (time.perf_counter() - start) * 1000
    logger.info(
        f"Trained {config.instance} with {n_clusters} clusters in "
        f"{model.init_time_ms:.1f} ms"
    )
    return model


def save_model(model: PredictiveModel, sink: Union[str, Path, BinaryIO]) -> None:
    """Write a model to a file name or a binary file object."""
    dump(model, sink)


def load_model(source: Union[str, Path, BinaryIO]) -> PredictiveModel:
    """Read a model written by :func:`save_model`.

    Raises
    ------
    ModelVersionError
        If the file was written by a newer persistence protocol.

    CorruptModelError
        If the file is not a readable model.
    """
    model = load(source)
    if not isinstance(model, PredictiveModel):
        raise CorruptModelError(
            f"Expected a predictive model, the file holds a {type(model).__name__}."
        )
    return model
