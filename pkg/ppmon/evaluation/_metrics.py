from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from ppmon.ltl import OutcomeLabel

from ._replay import ReplayResult


@dataclass(frozen=True)
class MetricsReport:
    """Quality and timing of a replay.

    Compliant is the positive class. ``accuracy`` only counts predicted
    traces; traces ending with ``maybe`` make up the ``failure_rate``.
    ``accuracy``, ``earliness`` and ``avg_prediction_time_ms`` are NaN when
    there is nothing to average.
    """

    tp: int
    fp: int
    tn: int
    fn: int
    n_traces: int
    n_maybe: int
    accuracy: float
    failure_rate: float
    earliness: float
    init_time_ms: float = 0.0
    processing_time_ms: float = 0.0
    avg_prediction_time_ms: float = math.nan

    @property
    def n_predicted(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def compute_metrics(
    results: Sequence[ReplayResult],
    gold: Optional[Mapping[str, OutcomeLabel]] = None,
    init_time_ms: float = 0.0,
) -> MetricsReport:
    """Confusion counts, accuracy, earliness, failure rate and timings.

    Parameters
    ----------
    results : list of ReplayResult
        The replayed test traces.

    gold : dict, default=None
        Outcome per case id, replacing the gold labels stored in ``results``.

    init_time_ms : float, default=0.0
        Training time of the model, copied to the report.

    Raises
    ------
    ValueError
        If ``gold`` lacks one of the replayed cases.
    """
    tp = fp = tn = fn = n_maybe = 0
    earliness = []
    latencies = []
    for result in results:
        actual = result.gold
        if gold is not None:
            try:
                actual = gold[result.case_id]
            except KeyError:
                raise ValueError(
                    f"No gold label for case {result.case_id!r}."
                ) from None
        latencies.extend(result.latencies_ms)

        verdict = result.verdict
        if not verdict.is_predicted:
            n_maybe += 1
            continue
        earliness.append(result.prediction_event_index / result.trace_length)
        positive = verdict.label is OutcomeLabel.COMPLIANT
        correct = verdict.label == actual
        if positive:
            tp, fp = tp + correct, fp + (not correct)
        else:
            tn, fn = tn + correct, fn + (not correct)

    n_traces = len(results)
    n_predicted = n_traces - n_maybe
    return MetricsReport(
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        n_traces=n_traces,
        n_maybe=n_maybe,
        accuracy=(tp + tn) / n_predicted if n_predicted else math.nan,
        failure_rate=n_maybe / n_traces if n_traces else 1.0,
        earliness=float(np.mean(earliness)) if earliness else math.nan,
        init_time_ms=init_time_ms,
        processing_time_ms=float(sum(result.processing_ms for result in results)),
        avg_prediction_time_ms=float(np.mean(latencies)) if latencies else math.nan,
    )
