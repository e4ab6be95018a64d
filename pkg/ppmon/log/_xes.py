from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from typing import Optional, Tuple

from ._builder import LogBuilder, RawAttributes
from ._model import AttributeType, EventLog
from ._schema import parse_timestamp
from .exceptions import LogParseError

logger = logging.getLogger(__name__)

ACTIVITY_KEY = "concept:name"
CASE_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"

XES_TYPES = {
    "string": AttributeType.TEXT,
    "int": AttributeType.INTEGER,
    "float": AttributeType.REAL,
    "boolean": AttributeType.BOOLEAN,
    "date": AttributeType.TIMESTAMP,
}


def _local(tag: str) -> str:
    # drop the "{namespace}" prefix ElementTree puts in front of tags
    return tag.rsplit("}", 1)[-1]


def _read_attributes(element: ET.Element, where: str) -> RawAttributes:
    attributes: RawAttributes = {}
    for child in element:
        tag = _local(child.tag)
        if tag not in XES_TYPES:
            # events nested in traces, lists, containers, ids, ...
            continue
        key = child.get("key")
        if key is None:
            raise LogParseError(f"<{tag}> attribute without a key", element=where)
        value = child.get("value")
        if value is None:
            raise LogParseError(f"Attribute {key!r} without a value", element=where)
        attributes[key] = (XES_TYPES[tag], value)
    return attributes


def _pop(attributes: RawAttributes, key: str) -> Optional[Tuple]:
    return attributes.pop(key, None)


def read_xes_log(data: bytes) -> EventLog:
    """Read the subset of XES made of typed trace and event attributes.

    ``concept:name`` names traces (case id) and events (activity) and
    ``time:timestamp`` times events; all other typed attributes become data.
    """
    if not data.strip():
        return EventLog()

    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, _ = exc.position
        raise LogParseError(f"Malformed XML: {exc}", line=line) from exc

    if _local(root.tag) != "log":
        raise LogParseError(
            f"Expected a <log> root, got <{_local(root.tag)}>", element="/"
        )

    builder = LogBuilder()
    traces = [child for child in root if _local(child.tag) == "trace"]
    for i, trace_element in enumerate(traces, start=1):
        where = f"trace[{i}]"
        trace_attributes = _read_attributes(trace_element, where)
        case = _pop(trace_attributes, CASE_KEY)
        if case is None:
            case_id = f"trace-{i}"
            logger.debug(f"{where} has no {CASE_KEY}, naming it {case_id!r}")
        else:
            case_id = case[1]
        if case_id in builder.traces:
            raise LogParseError(f"Duplicate case id {case_id!r}", element=where)

        builder.trace(case_id).attributes.update(trace_attributes)
        events = [child for child in trace_element if _local(child.tag) == "event"]
        for j, event_element in enumerate(events, start=1):
            event_where = f"{where}/event[{j}]"
            attributes = _read_attributes(event_element, event_where)
            activity = _pop(attributes, ACTIVITY_KEY)
            if activity is None or not activity[1]:
                raise LogParseError(
                    f"Event without {ACTIVITY_KEY}", element=event_where
                )
            timestamp = _pop(attributes, TIMESTAMP_KEY)
            if timestamp is None:
                raise LogParseError(
                    f"Event without {TIMESTAMP_KEY}", element=event_where
                )
            try:
                instant = parse_timestamp(timestamp[1])
            except ValueError as exc:
                raise LogParseError(str(exc), element=event_where) from exc
            builder.add_event(case_id, activity[1], instant, attributes)

    return builder.build()
