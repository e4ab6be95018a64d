from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, Iterable, Iterator, Tuple, Union


class MissingType:
    """The type of :data:`MISSING`, the value of an attribute never assigned.

    There is exactly one instance. It is falsy, prints as ``?`` and survives
    pickling as the same object, so identity checks (``value is MISSING``)
    keep working across worker processes.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "?"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return "MISSING"

    def __getstate__(self) -> dict:
        return {}


MISSING = MissingType()

AttributeValue = Union[str, int, float, bool, datetime, MissingType]


class AttributeType(str, enum.Enum):
    """Declared type of an attribute column."""

    BOOLEAN = "boolean"
    INTEGER = "integer"
    REAL = "real"
    TIMESTAMP = "timestamp"
    TEXT = "text"

    def __str__(self) -> str:
        return self.value

    @property
    def is_numeric(self) -> bool:
        """Whether values of this type are ordered and split by threshold."""
        return self in (
            AttributeType.INTEGER,
            AttributeType.REAL,
            AttributeType.TIMESTAMP,
        )


def numeric_value(value: AttributeValue) -> float:
    """Map an integer, real or timestamp value onto the real line.

    Timestamps become POSIX seconds.
    """
    if isinstance(value, datetime):
        return value.timestamp()
    return float(value)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Event:
    """One executed activity with its timestamp and data assignments."""

    activity: str
    timestamp: datetime
    attributes: Dict[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.activity:
            raise ValueError("An event needs a non-empty activity label.")


@dataclass(frozen=True)
class Trace:
    """One case: its identifier, ordered events and trace-level attributes.

    Trace-level attributes are visible from the very beginning of the case,
    i.e. they act as assignments made before the first event.
    """

    case_id: str
    events: Tuple[Event, ...] = ()
    attributes: Dict[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # accept any iterable of events but always store a tuple
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    @property
    def activities(self) -> Tuple[str, ...]:
        return tuple(event.activity for event in self.events)

    def prefix(self, length: int) -> "Trace":
        """The trace cut after its first ``length`` events."""
        return Trace(self.case_id, self.events[:length], self.attributes)

    def attribute_names(self) -> list[str]:
        """Names assigned anywhere in the trace, in order of first assignment."""
        names = dict.fromkeys(self.attributes)
        for event in self.events:
            names.update(dict.fromkeys(event.attributes))
        return list(names)


@dataclass(frozen=True)
class EventLog:
    """An ordered collection of traces plus the attribute schema."""

    traces: Tuple[Trace, ...] = ()
    attribute_schema: Dict[str, AttributeType] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "traces", tuple(self.traces))
        seen = set()
        for trace in self.traces:
            if trace.case_id in seen:
                raise ValueError(f"Case id {trace.case_id!r} appears more than once.")
            seen.add(trace.case_id)

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(trace) for trace in self.traces)

    def with_traces(self, traces: Iterable[Trace]) -> "EventLog":
        """A log over ``traces`` sharing this log's schema."""
        return EventLog(tuple(traces), dict(self.attribute_schema))


@dataclass(frozen=True)
class DataSnapshot:
    """Last known value of every attribute after a given event."""

    values: Dict[str, AttributeValue] = field(default_factory=dict)

    def __getitem__(self, name: str) -> AttributeValue:
        return self.values.get(name, MISSING)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def assigned(self) -> Dict[str, AttributeValue]:
        """Only the attributes holding a value."""
        return {k: v for k, v in self.values.items() if v is not MISSING}


def snapshot_at(
    trace: Trace, position: int, schema: Iterable[str] | None = None
) -> DataSnapshot:
    """Fold the attribute assignments of a trace up to ``position``.

    Parameters
    ----------
    trace : Trace
        The (possibly running) trace.

    position : int
        1-based index of the snapshot event.

    schema : iterable of str, default=None
        Attribute universe of the snapshot. If ``None``, every attribute the
        trace assigns anywhere is included, so attributes assigned only after
        ``position`` show up as :data:`MISSING`.

    Returns
    -------
    snapshot : DataSnapshot
        Last-write-wins values; trace-level attributes are applied before the
        first event.

    Examples
    --------
    >>> from datetime import datetime, timezone
    >>> t0 = datetime(2020, 1, 1, tzinfo=timezone.utc)
    >>> trace = Trace("t", [Event("M", t0, {"sym": "painA"}), Event("R", t0, {"x": 1})])
    >>> snapshot_at(trace, 1).values
    {'sym': 'painA', 'x': ?}
    """
    if not 1 <= position <= len(trace):
        raise IndexError(
            f"Snapshot position {position} is outside of trace {trace.case_id!r} "
            f"with {len(trace)} events."
        )

    names = trace.attribute_names() if schema is None else list(schema)
    values: Dict[str, AttributeValue] = dict.fromkeys(names, MISSING)
    # an empty cell is no assignment, attributes are never unset
    assignments = [trace.attributes] + [e.attributes for e in trace.events[:position]]
    for attributes in assignments:
        values.update((k, v) for k, v in attributes.items() if v is not MISSING)
    if schema is not None:
        # assignments outside of the universe are not part of the snapshot
        values = {name: values[name] for name in names}
    return DataSnapshot(values)


def _start_key(trace: Trace) -> tuple[Any, ...]:
    # empty traces have no start time and go last
    if not trace.events:
        return (1,)
    return (0, trace.events[0].timestamp)


def temporal_split(
    log: EventLog, training_fraction: float = 0.8
) -> tuple[EventLog, EventLog]:
    """Split a log in time into a training and a testing part.

    Traces are ordered by the timestamp of their first event (ties keep log
    order) and the first ``ceil(training_fraction * n)`` of them form the
    training log.

    Parameters
    ----------
    log : EventLog
        A non-empty log.

    training_fraction : float, default=0.8
        Share of traces used for training, strictly between 0 and 1.

    Returns
    -------
    training, testing : tuple of EventLog
        Both logs share the schema of ``log``.
    """
    if not 0 < training_fraction < 1:
        raise ValueError(
            f"training_fraction must be in (0, 1), got {training_fraction} instead."
        )
    if not len(log):
        raise ValueError("Cannot split an empty log.")

    ordered = sorted(log.traces, key=_start_key)
    # rounding keeps products such as 0.7 * 10 from overshooting the ceiling
    n_train = math.ceil(round(training_fraction * len(ordered), 9))
    return log.with_traces(ordered[:n_train]), log.with_traces(ordered[n_train:])
