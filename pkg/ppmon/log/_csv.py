from __future__ import annotations

import io
import logging
import re

import pandas as pd

from ._builder import LogBuilder
from ._model import EventLog
from ._schema import format_value, parse_timestamp
from .exceptions import LogParseError

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("case_id", "activity", "timestamp")
_PANDAS_LINE_RE = re.compile(r"line (\d+)")


def read_csv_log(data: bytes) -> EventLog:
    """Read a CSV event log.

    The header must start with ``case_id,activity,timestamp``; every further
    column is an event attribute. Empty cells are missing values.
    """
    if not data.strip():
        return EventLog()

    try:
        frame = pd.read_csv(
            io.BytesIO(data), dtype=str, keep_default_na=False, na_filter=False
        )
    except pd.errors.EmptyDataError:
        return EventLog()
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        match = _PANDAS_LINE_RE.search(str(exc))
        line = int(match.group(1)) if match else None
        raise LogParseError(f"Malformed CSV: {exc}", line=line) from exc

    columns = [str(column) for column in frame.columns]
    if tuple(columns[:3]) != REQUIRED_COLUMNS:
        raise LogParseError(
            f"CSV header must start with {','.join(REQUIRED_COLUMNS)}, got "
            f"{','.join(columns[:3])} instead",
            line=1,
        )
    attribute_columns = columns[3:]

    builder = LogBuilder()
    # the header is line 1
    for line, row in enumerate(frame.itertuples(index=False, name=None), start=2):
        case_id, activity, timestamp = row[:3]
        if not case_id:
            raise LogParseError("Empty case_id", line=line)
        if not activity:
            raise LogParseError("Empty activity", line=line)
        try:
            instant = parse_timestamp(timestamp)
        except ValueError as exc:
            raise LogParseError(str(exc), line=line) from exc
        attributes = {
            name: (None, text) for name, text in zip(attribute_columns, row[3:])
        }
        builder.add_event(case_id, activity, instant, attributes)
    return builder.build()


def serialize_csv(log: EventLog) -> str:
    """Write a log in the CSV format read by :func:`read_csv_log`.

    Trace-level attributes have no place in this format and are dropped.
    """
    columns = list(REQUIRED_COLUMNS) + list(log.attribute_schema)
    rows = []
    for trace in log:
        if trace.attributes:
            logger.warning(
                f"Dropping trace-level attributes of case {trace.case_id!r}, CSV "
                "logs only hold event attributes."
            )
        for event in trace:
            row = [trace.case_id, event.activity, format_value(event.timestamp)]
            row += [
                format_value(event.attributes[name]) if name in event.attributes else ""
                for name in log.attribute_schema
            ]
            rows.append(row)

    frame = pd.DataFrame(rows, columns=columns, dtype=object)
    return frame.to_csv(index=False, lineterminator="\n")
