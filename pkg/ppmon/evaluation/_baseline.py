"""The on-the-fly baseline: at every evaluation point, filter the history by
control flow similarity and grow a decision tree for the running prefix only."""

from __future__ import annotations

import logging
import time
from typing import Dict, List, Mapping, Optional, Tuple

from ppmon.cluster import edit_distances_to
from ppmon.cluster._distance import SequenceCodes
from ppmon.encoding import FeatureVector
from ppmon.log import EventLog, Trace, snapshot_at
from ppmon.ltl import LabelingFunction, OutcomeLabel
from ppmon.monitor import (
    CaseState,
    CaseStatus,
    MonitorVerdict,
    RuntimeConfig,
    on_case_end,
)
from ppmon.pipeline import resolve_labeler
from ppmon.tree import DecisionTree

from ._replay import ReplayResult, gold_standard

logger = logging.getLogger(__name__)

# distances are ratios of small integers
_TOLERANCE = 1e-12


def _check_threshold(similarity_threshold: float) -> None:
    if not 0 <= similarity_threshold <= 1:
        raise ValueError(
            f"similarity_threshold must be in [0, 1], got {similarity_threshold!r}."
        )


class OnTheFlyPredictor:
    """Predicts running prefixes from the history alone, without any offline
    model.

    The control flow of the history is encoded once per prefix length and
    the history labels are computed once; everything else happens per query.

    Parameters
    ----------
    history : EventLog
        Completed historical traces.

    formula : Formula or str, default=None
        The monitored predicate.

    similarity_threshold : float, default=0.8
        Historical prefixes at normalized edit distance at most
        ``1 - similarity_threshold`` from the running prefix are similar.

    labeler : callable, default=None
        Custom classification function replacing ``formula``.

    min_leaf : int, default=2
        Minimum leaf size of the trees grown per query.
    """

    def __init__(
        self,
        history: EventLog,
        formula=None,
        similarity_threshold: float = 0.8,
        *,
        labeler: Optional[LabelingFunction] = None,
        min_leaf: int = 2,
    ) -> None:
        _check_threshold(similarity_threshold)
        if not len(history):
            raise ValueError("The on-the-fly predictor needs a non-empty history.")
        self.history = history
        self.similarity_threshold = similarity_threshold
        self.min_leaf = min_leaf
        label_of = resolve_labeler(formula, labeler)
        self.labels = [label_of(trace) for trace in history]
        self.schema = dict(history.attribute_schema)
        self._codes: Dict[int, Tuple[List[int], SequenceCodes]] = {}

    def _candidates(self, length: int) -> Tuple[List[int], SequenceCodes]:
        # the historical traces long enough to have a prefix of this length
        if length not in self._codes:
            indices = [
                i for i, trace in enumerate(self.history) if len(trace) >= length
            ]
            sequences = [self.history.traces[i].activities[:length] for i in indices]
            self._codes[length] = (indices, SequenceCodes(sequences))
        return self._codes[length]

    def similar_traces(self, running_prefix: Trace) -> List[int]:
        """Indices of the historical traces whose prefix is similar to
        ``running_prefix``."""
        indices, codes = self._candidates(len(running_prefix))
        if not indices:
            return []
        distances = edit_distances_to(running_prefix.activities, codes)
        cutoff = 1 - self.similarity_threshold + _TOLERANCE
        return [i for i, distance in zip(indices, distances) if distance <= cutoff]

    def training_rows(self, running_prefix: Trace) -> List[FeatureVector]:
        length = len(running_prefix)
        rows = []
        for i in self.similar_traces(running_prefix):
            snapshot = snapshot_at(self.history.traces[i], length, self.schema)
            rows.append(FeatureVector(dict(snapshot.values), self.labels[i]))
        return rows

    def predict(
        self, running_prefix: Trace, runtime_config: Optional[RuntimeConfig] = None
    ) -> MonitorVerdict:
        """Train a tree on the similar history and query it with the snapshot
        of the running prefix."""
        config = RuntimeConfig() if runtime_config is None else runtime_config
        n = len(running_prefix)
        case_id = running_prefix.case_id
        if not n:
            return MonitorVerdict.deferred(case_id, 0, "empty running prefix")

        rows = self.training_rows(running_prefix)
        if not rows:
            return MonitorVerdict.deferred(case_id, n, "no similar historical prefixes")

        tree = DecisionTree(min_leaf=self.min_leaf).fit(rows, self.schema)
        prediction = tree.predict(snapshot_at(running_prefix, n, self.schema))
        reason = config.rejects(prediction)
        if reason is not None:
            return MonitorVerdict.deferred(case_id, n, reason, prediction)
        return MonitorVerdict.predicted(case_id, prediction, None, n)


def on_the_fly_predict(
    history: EventLog,
    running_prefix: Trace,
    formula=None,
    similarity_threshold: float = 0.8,
    runtime_config: Optional[RuntimeConfig] = None,
    *,
    labeler: Optional[LabelingFunction] = None,
) -> MonitorVerdict:
    """Predict a running prefix the way the on-the-fly approach does.

    Every historical prefix of the same length whose control flow is similar
    enough is labeled by its completed trace; a decision tree trained on the
    data snapshots of those prefixes is queried with the snapshot of the
    running prefix and the prediction goes through the reliability gate.
    Without similar prefixes the verdict is deferred.

    See :class:`OnTheFlyPredictor` to answer many queries on one history.
    """
    predictor = OnTheFlyPredictor(
        history, formula, similarity_threshold, labeler=labeler
    )
    return predictor.predict(running_prefix, runtime_config)


def similar_prefixes(
    history: EventLog, running_prefix: Trace, similarity_threshold: float = 0.8
) -> List[Trace]:
    """Historical prefixes the baseline would train on for ``running_prefix``."""
    _check_threshold(similarity_threshold)
    length = len(running_prefix)
    cutoff = 1 - similarity_threshold + _TOLERANCE
    candidates = [trace for trace in history if len(trace) >= length]
    if not candidates:
        return []
    distances = edit_distances_to(
        running_prefix.activities,
        [trace.activities[:length] for trace in candidates],
    )
    return [
        trace.prefix(length)
        for trace, distance in zip(candidates, distances)
        if distance <= cutoff
    ]


def replay_baseline(
    history: EventLog,
    test_log: EventLog,
    formula=None,
    similarity_threshold: float = 0.8,
    runtime_config: Optional[RuntimeConfig] = None,
    *,
    labeler: Optional[LabelingFunction] = None,
    gold: Optional[Mapping[str, OutcomeLabel]] = None,
) -> List[ReplayResult]:
    """Replay the test traces against the on-the-fly baseline, with the same
    evaluation points and gate as the monitor."""
    config = RuntimeConfig() if runtime_config is None else runtime_config
    predictor = OnTheFlyPredictor(
        history, formula, similarity_threshold, labeler=labeler
    )
    if gold is None:
        gold = gold_standard(test_log, formula, labeler=labeler)

    results = []
    for trace in test_log:
        state = CaseState(trace.case_id)
        latencies = []
        start = time.perf_counter()
        for n in range(1, len(trace) + 1):
            if not config.is_evaluation_point(n):
                continue
            tick = time.perf_counter()
            verdict = predictor.predict(trace.prefix(n), config)
            latencies.append((time.perf_counter() - tick) * 1000)
            if verdict.is_predicted:
                state = CaseState(
                    trace.case_id, trace.events[:n], CaseStatus.PREDICTED, verdict
                )
                break
        else:
            state = CaseState(trace.case_id, trace.events)
        final = on_case_end(state)
        processing_ms = (time.perf_counter() - start) * 1000
        results.append(
            ReplayResult(
                trace.case_id,
                gold[trace.case_id],
                final,
                len(trace),
                tuple(latencies),
                processing_ms,
            )
        )
    logger.info(
        f"Replayed {len(results)} traces against the on-the-fly baseline "
        f"(similarity_threshold={similarity_threshold})"
    )
    return results

