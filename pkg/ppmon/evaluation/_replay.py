from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Literal, Mapping, Optional, Tuple

from joblib import Parallel, delayed

from ppmon.log import EventLog, Trace
from ppmon.ltl import LabelingFunction, OutcomeLabel
from ppmon.monitor import (
    CaseState,
    MonitorVerdict,
    RuntimeConfig,
    on_case_end,
    on_event,
)
from ppmon.pipeline import resolve_labeler

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayResult:
    """How the monitor fared on one test trace.

    Attributes
    ----------
    case_id : str

    gold : OutcomeLabel
        Outcome of the completed trace.

    verdict : MonitorVerdict
        Final verdict, ``maybe`` if no prediction passed the gate.

    trace_length : int

    latencies_ms : tuple of float
        Time taken by every evaluation point, deferred ones included.

    processing_ms : float
        Time taken by the whole replay of the trace.
    """

    case_id: str
    gold: OutcomeLabel
    verdict: MonitorVerdict
    trace_length: int
    latencies_ms: Tuple[float, ...] = ()
    processing_ms: float = 0.0

    @property
    def prediction_event_index(self) -> Optional[int]:
        """1-based index of the event at which the prediction was made."""
        if self.verdict.is_predicted:
            return self.verdict.events_seen
        return None


def gold_standard(
    test_log: EventLog, formula=None, *, labeler: Optional[LabelingFunction] = None
) -> Dict[str, OutcomeLabel]:
    """Label every completed trace of ``test_log``.

    Examples
    --------
    >>> from ppmon.log.tests._utils import recovery_log
    >>> gold = gold_standard(recovery_log(), 'F("R")')
    >>> [case for case, label in gold.items() if label == "compliant"]
    ['t1', 't3', 't5']
    """
    label_of = resolve_labeler(formula, labeler)
    return {trace.case_id: label_of(trace) for trace in test_log}


def replay_trace(
    trace: Trace, model, config: RuntimeConfig, gold: OutcomeLabel
) -> ReplayResult:
    """Push the events of a completed trace through the monitor, one by one,
    until a prediction passes the gate or the trace ends."""
    state = CaseState(trace.case_id)
    latencies: List[float] = []
    start = time.perf_counter()
    for event in trace:
        tick = time.perf_counter()
        state, verdict = on_event(state, event, model, config)
        if verdict is not None:
            latencies.append((time.perf_counter() - tick) * 1000)
            if verdict.is_predicted:
                break
    final = on_case_end(state, model, config)
    processing_ms = (time.perf_counter() - start) * 1000
    return ReplayResult(
        trace.case_id, gold, final, len(trace), tuple(latencies), processing_ms
    )


def replay(
    test_log: EventLog,
    model,
    runtime_config: Optional[RuntimeConfig] = None,
    *,
    gold: Optional[Mapping[str, OutcomeLabel]] = None,
    labeler: Optional[LabelingFunction] = None,
    mode: Literal["serial", "parallel"] = "serial",
    n_jobs: Optional[int] = None,
) -> List[ReplayResult]:
    """Simulate the test traces as an event stream against a trained model.

    Parameters
    ----------
    test_log : EventLog
        Completed test traces.

    model : PredictiveModel
        The trained model.

    runtime_config : RuntimeConfig, default=None
        Reliability gate and evaluation schedule.

    gold : dict, default=None
        Outcome of every test trace. Computed from ``labeler`` or else from
        the model's formula when not given.

    labeler : callable, default=None
        Custom classification function of completed traces.

    mode : {"serial", "parallel"}, default="serial"
        ``"parallel"`` replays traces on ``n_jobs`` threads, which gives more
        throughput but noisier latencies.

    n_jobs : int, default=None
        Threads used in parallel mode.

    Returns
    -------
    results : list of ReplayResult
        In the order of the test traces.
    """
    config = RuntimeConfig() if runtime_config is None else runtime_config
    if gold is None:
        gold = gold_standard(test_log, model.formula, labeler=labeler)
    if mode not in ("serial", "parallel"):
        raise ValueError(f"mode must be 'serial' or 'parallel', got {mode!r}.")

    if mode == "parallel":
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(replay_trace)(trace, model, config, gold[trace.case_id])
            for trace in test_log
        )
    else:
        results = [
            replay_trace(trace, model, config, gold[trace.case_id])
            for trace in test_log
        ]
    n_predicted = sum(result.verdict.is_predicted for result in results)
    logger.info(
        f"Replayed {len(results)} traces, {n_predicted} predicted "
        f"(min_support={config.min_support}, "
        f"min_probability={config.min_probability})"
    )
    return results
