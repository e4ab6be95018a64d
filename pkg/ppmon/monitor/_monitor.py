from __future__ import annotations

import enum
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from numbers import Integral, Real
from typing import Any, Dict, Optional, Tuple

from ppmon.log import Event, Trace
from ppmon.ltl import OutcomeLabel
from ppmon.tree import Prediction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuntimeConfig:
    """Reliability gate and evaluation schedule of the monitor.

    Parameters
    ----------
    min_support : int, default=6
        Minimum class support of a reliable prediction.

    min_probability : float, default=0.7
        Minimum class probability of a reliable prediction.

    evaluation_interval : int, default=5
        Running cases are evaluated at events ``1, 1 + h, 1 + 2h, ...``.
    """

    min_support: int = 6
    min_probability: float = 0.7
    evaluation_interval: int = 5

    def __post_init__(self) -> None:
        s = self.min_support
        if isinstance(s, bool) or not isinstance(s, Integral) or s < 0:
            raise ValueError(f"min_support must be a non-negative integer, got {s!r}.")
        p = self.min_probability
        if isinstance(p, bool) or not isinstance(p, Real) or not 0 <= p <= 1:
            raise ValueError(f"min_probability must be in [0, 1], got {p!r}.")
        h = self.evaluation_interval
        if isinstance(h, bool) or not isinstance(h, Integral) or h < 1:
            raise ValueError(
                f"evaluation_interval must be a positive integer, got {h!r}."
            )

    def is_evaluation_point(self, events_seen: int) -> bool:
        return events_seen >= 1 and (events_seen - 1) % self.evaluation_interval == 0

    def rejects(self, prediction: Prediction) -> Optional[str]:
        """Why ``prediction`` fails the reliability gate, ``None`` if it
        passes."""
        if prediction.support < self.min_support:
            return f"support {prediction.support} < {self.min_support}"
        if prediction.probability < self.min_probability:
            return f"probability {prediction.probability:.3f} < {self.min_probability}"
        return None


class VerdictKind(str, enum.Enum):
    PREDICTED = "predicted"
    DEFERRED = "deferred"
    MAYBE = "maybe"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MonitorVerdict:
    """The monitor's answer for a case at an evaluation point or at its end.

    ``label`` is only set for predicted verdicts; deferred verdicts carry the
    probability of the rejected prediction, if any, and the reason.
    """

    case_id: str
    kind: VerdictKind
    events_seen: int
    label: Optional[OutcomeLabel] = None
    probability: Optional[float] = None
    support: Optional[int] = None
    cluster: Optional[int] = None
    reason: Optional[str] = None

    @classmethod
    def predicted(
        cls,
        case_id: str,
        prediction: Prediction,
        cluster: Optional[int],
        events_seen: int,
    ) -> "MonitorVerdict":
        return cls(
            case_id,
            VerdictKind.PREDICTED,
            events_seen,
            label=prediction.label,
            probability=prediction.probability,
            support=prediction.support,
            cluster=cluster,
        )

    @classmethod
    def deferred(
        cls,
        case_id: str,
        events_seen: int,
        reason: str,
        prediction: Optional[Prediction] = None,
        cluster: Optional[int] = None,
    ) -> "MonitorVerdict":
        return cls(
            case_id,
            VerdictKind.DEFERRED,
            events_seen,
            probability=None if prediction is None else prediction.probability,
            support=None if prediction is None else prediction.support,
            cluster=cluster,
            reason=reason,
        )

    @classmethod
    def maybe(cls, case_id: str, events_seen: int) -> "MonitorVerdict":
        return cls(case_id, VerdictKind.MAYBE, events_seen)

    @property
    def is_predicted(self) -> bool:
        return self.kind is VerdictKind.PREDICTED

    def to_message(self, latency_ms: Optional[float] = None) -> Dict[str, Any]:
        """The outbound message of the streaming protocol."""
        message: Dict[str, Any] = {
            "case": self.case_id,
            "verdict": self.kind.value,
            "label": None if self.label is None else self.label.value,
            "probability": self.probability,
            "support": self.support,
            "cluster": self.cluster,
            "events_seen": self.events_seen,
        }
        if self.reason is not None:
            message["reason"] = self.reason
        if latency_ms is not None:
            message["latency_ms"] = round(latency_ms, 3)
        return message


class CaseStatus(str, enum.Enum):
    OPEN = "open"
    PREDICTED = "predicted"
    FINISHED_MAYBE = "finished_maybe"


@dataclass(frozen=True)
class CaseState:
    """A running case: its events up to the prediction, if any, and its status."""

    case_id: str
    events: Tuple[Event, ...] = ()
    status: CaseStatus = CaseStatus.OPEN
    verdict: Optional[MonitorVerdict] = None
    # events after the prediction are counted, not kept
    events_after_prediction: int = 0

    @property
    def events_seen(self) -> int:
        return len(self.events) + self.events_after_prediction

    @property
    def trace(self) -> Trace:
        return Trace(self.case_id, self.events)


def on_event(
    state: CaseState, event: Event, model, config: RuntimeConfig
) -> Tuple[CaseState, Optional[MonitorVerdict]]:
    """Feed one event of a running case to the monitor.

    At an evaluation point the prefix is assigned to its cluster and the
    cluster's classifier is queried with the current data snapshot; a
    prediction passing the reliability gate is final.

    Parameters
    ----------
    state : CaseState
        The case before the event.

    event : Event
        The new event.

    model : PredictiveModel
        The trained model; only its ``predict`` method is used.

    config : RuntimeConfig
        Gate and evaluation schedule.

    Returns
    -------
    state : CaseState
        The case after the event.

    verdict : MonitorVerdict or None
        The verdict of the evaluation point, ``None`` between evaluation
        points and once the case is predicted.
    """
    if state.status is CaseStatus.FINISHED_MAYBE:
        logger.warning(f"Ignoring an event of closed case {state.case_id!r}")
        return state, None

    if state.status is CaseStatus.PREDICTED:
        later = state.events_after_prediction + 1
        return replace(state, events_after_prediction=later), None

    state = replace(state, events=state.events + (event,))
    n = state.events_seen
    if not config.is_evaluation_point(n):
        return state, None

    assignment, prediction = model.predict(state.events)
    cluster = assignment.cluster_id
    if prediction is None:
        verdict = MonitorVerdict.deferred(
            state.case_id, n, f"cluster {cluster} has no classifier", cluster=cluster
        )
        return state, verdict

    reason = config.rejects(prediction)
    if reason is not None:
        return state, MonitorVerdict.deferred(
            state.case_id, n, reason, prediction, cluster
        )

    verdict = MonitorVerdict.predicted(state.case_id, prediction, cluster, n)
    return replace(state, status=CaseStatus.PREDICTED, verdict=verdict), verdict


def on_case_end(
    state: CaseState, model=None, config: Optional[RuntimeConfig] = None
) -> MonitorVerdict:
    """Final verdict of a case: its reliable prediction if there was one,
    otherwise ``maybe``.

    ``model`` and ``config`` are accepted for symmetry with :func:`on_event`;
    the final verdict does not query the model.
    """
    if state.verdict is not None:
        return state.verdict
    return MonitorVerdict.maybe(state.case_id, state.events_seen)


@dataclass
class _Case:
    state: CaseState
    lock: threading.Lock = field(default_factory=threading.Lock)


class Monitor:
    """Running cases of one event stream.

    Distinct cases may be fed from different threads at the same time; the
    events of one case are processed one at a time, in arrival order.

    Parameters
    ----------
    model : PredictiveModel
        The shared, read-only model.

    config : RuntimeConfig, default=None
        Gate and evaluation schedule; defaults to :class:`RuntimeConfig`.

    closed_capacity : int, default=10_000
        How many ended case ids are remembered to ignore their late events.
        Once exceeded, the oldest ids are forgotten, and a late event of a
        forgotten case opens a new case.
    """

    def __init__(
        self,
        model,
        config: Optional[RuntimeConfig] = None,
        closed_capacity: int = 10_000,
    ) -> None:
        c = closed_capacity
        if isinstance(c, bool) or not isinstance(c, Integral) or c < 0:
            raise ValueError(
                f"closed_capacity must be a non-negative integer, got {c!r}."
            )
        self.model = model
        self.config = RuntimeConfig() if config is None else config
        self.closed_capacity = closed_capacity
        self._cases: Dict[str, _Case] = {}
        self._closed: OrderedDict[str, None] = OrderedDict()
        self._lock = threading.Lock()

    def _case(self, case_id: str) -> Optional[_Case]:
        with self._lock:
            if case_id in self._closed:
                return None
            if case_id not in self._cases:
                self._cases[case_id] = _Case(CaseState(case_id))
            return self._cases[case_id]

    def event(self, case_id: str, event: Event) -> Optional[MonitorVerdict]:
        """Process an event; returns the verdict of an evaluation point."""
        case = self._case(case_id)
        if case is None:
            logger.warning(f"Ignoring an event of closed case {case_id!r}")
            return None
        with case.lock:
            case.state, verdict = on_event(case.state, event, self.model, self.config)
        return verdict

    def end(self, case_id: str) -> MonitorVerdict:
        """Close a case and return its final verdict.

        A case ending without any event is ``maybe``.
        """
        with self._lock:
            case = self._cases.pop(case_id, None)
            self._closed[case_id] = None
            self._closed.move_to_end(case_id)
            while len(self._closed) > self.closed_capacity:
                self._closed.popitem(last=False)
        if case is None:
            return on_case_end(CaseState(case_id, status=CaseStatus.FINISHED_MAYBE))
        with case.lock:
            return on_case_end(case.state, self.model, self.config)

    @property
    def open_cases(self) -> int:
        with self._lock:
            return len(self._cases)
