from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional, Tuple

from ._model import AttributeType, Event, EventLog, Trace
from ._schema import infer_type, merge_declared, parse_value, resolve_type

logger = logging.getLogger(__name__)

# attribute name -> (declared type or None, textual value)
RawAttributes = Dict[str, Tuple[Optional[AttributeType], str]]


@dataclass
class RawEvent:
    activity: str
    timestamp: datetime
    attributes: RawAttributes
    order: int


@dataclass
class RawTrace:
    case_id: str
    attributes: RawAttributes = field(default_factory=dict)
    events: List[RawEvent] = field(default_factory=list)


class LogBuilder:
    """Collect textual attribute values, then type them all at once.

    Readers add traces and events with the raw text of every attribute (and
    the declared type, if the format has one). :meth:`build` settles the
    schema over the whole log before converting any value, so a single odd
    value demotes its column instead of failing the read.
    """

    def __init__(self) -> None:
        self.traces: Dict[str, RawTrace] = {}
        self._n_events = 0

    def trace(self, case_id: str) -> RawTrace:
        if case_id not in self.traces:
            self.traces[case_id] = RawTrace(case_id)
        return self.traces[case_id]

    def add_event(
        self,
        case_id: str,
        activity: str,
        timestamp: datetime,
        attributes: RawAttributes,
    ) -> None:
        self.trace(case_id).events.append(
            RawEvent(activity, timestamp, attributes, self._n_events)
        )
        self._n_events += 1

    def _iter_attributes(self):
        for raw_trace in self.traces.values():
            yield raw_trace.attributes
            for raw_event in raw_trace.events:
                yield raw_event.attributes

    def schema(self) -> Dict[str, AttributeType]:
        declared: Dict[str, list] = defaultdict(list)
        texts: Dict[str, list] = defaultdict(list)
        for attributes in self._iter_attributes():
            for name, (attr_type, text) in attributes.items():
                texts[name].append(text)
                if attr_type is not None:
                    declared[name].append(attr_type)

        schema = {}
        for name, values in texts.items():
            if declared[name]:
                attr_type = merge_declared(name, declared[name])
            else:
                attr_type = infer_type(values)
            resolved = resolve_type(attr_type, values)
            if resolved is not attr_type:
                logger.warning(
                    f"Attribute {name!r} has values that are not {attr_type}, "
                    "reading it as text."
                )
            schema[name] = resolved
        return schema

    def build(self) -> EventLog:
        schema = self.schema()

        def convert(attributes: RawAttributes):
            return {
                name: parse_value(text, schema[name])
                for name, (_, text) in attributes.items()
            }

        traces = []
        for raw_trace in self.traces.values():
            # sorted is stable: equal timestamps keep document order
            raw_events = sorted(raw_trace.events, key=lambda e: (e.timestamp, e.order))
            events = [
                Event(e.activity, e.timestamp, convert(e.attributes))
                for e in raw_events
            ]
            traces.append(
                Trace(raw_trace.case_id, events, convert(raw_trace.attributes))
            )

        log = EventLog(traces, schema)
        logger.info(
            f"Read {len(log)} traces with {log.n_events} events and "
            f"{len(schema)} attributes."
        )
        return log
