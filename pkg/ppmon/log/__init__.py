from ._csv import serialize_csv
from ._model import (
    MISSING,
    AttributeType,
    AttributeValue,
    DataSnapshot,
    Event,
    EventLog,
    MissingType,
    Trace,
    numeric_value,
    snapshot_at,
    temporal_split,
)
from ._parse import parse_log, read_log

__all__ = [
    "MISSING",
    "AttributeType",
    "AttributeValue",
    "DataSnapshot",
    "Event",
    "EventLog",
    "MissingType",
    "Trace",
    "numeric_value",
    "parse_log",
    "read_log",
    "serialize_csv",
    "snapshot_at",
    "temporal_split",
]
