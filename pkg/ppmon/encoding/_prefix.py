from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ppmon.log import AttributeValue, Event, EventLog, Trace, snapshot_at
from ppmon.ltl import OutcomeLabel


@dataclass(frozen=True)
class PrefixSelectionConfig:
    """Which prefixes of a trace take part in training.

    Prefix lengths are ``1, 1 + gap, 1 + 2 * gap, ...`` up to ``max_length``.
    """

    gap: int = 5
    max_length: int = 21

    def __post_init__(self) -> None:
        for name in ("gap", "max_length"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}.")


def select_prefixes(trace: Trace, config: PrefixSelectionConfig) -> List[int]:
    """Lengths of the prefixes of ``trace`` selected by ``config``.

    Examples
    --------
    >>> from datetime import datetime, timezone
    >>> trace = Trace("c", [Event("a", datetime(2020, 1, 1, tzinfo=timezone.utc))] * 30)
    >>> select_prefixes(trace, PrefixSelectionConfig(gap=5))
    [1, 6, 11, 16, 21]
    """
    return list(range(1, min(config.max_length, len(trace)) + 1, config.gap))


def build_alphabet(training: EventLog) -> Tuple[str, ...]:
    """Sorted distinct activity labels of a log."""
    return tuple(sorted({event.activity for trace in training for event in trace}))


def _labels(prefix: Trace | Iterable[Event] | Iterable[str]) -> Tuple[str, ...]:
    if isinstance(prefix, Trace):
        return prefix.activities
    return tuple(item.activity if isinstance(item, Event) else item for item in prefix)


def encode_frequency(
    prefix: Trace | Iterable[Event] | Iterable[str],
    alphabet: Sequence[str],
    unseen: Optional[Counter] = None,
) -> np.ndarray:
    """Count how often every activity of ``alphabet`` occurs in a prefix.

    Parameters
    ----------
    prefix : Trace, iterable of Event or iterable of str
        The prefix, or just its activity labels.

    alphabet : sequence of str
        The ordered alphabet; it fixes the length and order of the vector.

    unseen : collections.Counter, default=None
        If given, activities outside of ``alphabet`` are tallied here. They
        have no slot in the vector and are otherwise ignored.

    Returns
    -------
    vector : numpy.ndarray of int64
        One count per alphabet symbol.

    Examples
    --------
    >>> alphabet = ["A", "C", "D", "M", "P", "R", "S", "V"]
    >>> encode_frequency("M A C D A C D A P R".split(), alphabet).tolist()
    [3, 2, 2, 1, 1, 1, 0, 0]
    """
    index = {activity: i for i, activity in enumerate(alphabet)}
    vector = np.zeros(len(alphabet), dtype=np.int64)
    for activity in _labels(prefix):
        slot = index.get(activity)
        if slot is None:
            if unseen is not None:
                unseen[activity] += 1
            continue
        vector[slot] += 1
    return vector


@dataclass(frozen=True)
class FeatureVector:
    """The data snapshot of a prefix's last event, plus the outcome label.

    ``label`` is only known for training prefixes; it is ``None`` at runtime.
    """

    values: Dict[str, AttributeValue] = field(default_factory=dict)
    label: Optional[OutcomeLabel] = None


@dataclass(frozen=True)
class EncodedPrefix:
    """A prefix encoded for clustering (both control flow encodings) and for
    classification (its feature vector)."""

    case_id: str
    prefix_length: int
    sequence: Tuple[str, ...]
    frequency: Tuple[int, ...]
    features: FeatureVector

    @property
    def frequency_vector(self) -> np.ndarray:
        return np.asarray(self.frequency, dtype=np.float64)


def encode_prefix(
    trace: Trace,
    length: int,
    alphabet: Sequence[str],
    schema: Iterable[str],
    label: Optional[OutcomeLabel] = None,
) -> EncodedPrefix:
    """Encode the prefix of ``trace`` made of its first ``length`` events.

    Raises ``IndexError`` if ``length`` is not between 1 and ``len(trace)``.
    """
    if not 1 <= length <= len(trace):
        raise IndexError(
            f"Prefix length {length} is outside of trace {trace.case_id!r} with "
            f"{len(trace)} events."
        )
    sequence = trace.activities[:length]
    frequency = encode_frequency(sequence, alphabet)
    snapshot = snapshot_at(trace, length, schema)
    return EncodedPrefix(
        case_id=trace.case_id,
        prefix_length=length,
        sequence=sequence,
        frequency=tuple(int(count) for count in frequency),
        features=FeatureVector(dict(snapshot.values), label),
    )
