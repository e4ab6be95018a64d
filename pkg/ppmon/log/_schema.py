"""Attribute type inference and value conversion shared by the log readers."""

from __future__ import annotations

import re
from datetime import datetime
from typing import Iterable, Sequence

from ._model import MISSING, AttributeType, AttributeValue
from .exceptions import SchemaError

_INTEGER_RE = re.compile(r"[+-]?\d+")
_REAL_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_TIMESTAMP_RE = re.compile(
    r"(?P<date>\d{4}-\d{2}-\d{2})[Tt ](?P<time>\d{2}:\d{2}:\d{2})"
    r"(?:\.(?P<fraction>\d+))?(?P<offset>[Zz]|[+-]\d{2}:\d{2})?"
)
_BOOLEANS = {"true": True, "false": False}

# types are tried in this order, the first one accepting every value wins
INFERENCE_ORDER: Sequence[AttributeType] = (
    AttributeType.BOOLEAN,
    AttributeType.INTEGER,
    AttributeType.REAL,
    AttributeType.TIMESTAMP,
)


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC-3339 timestamp.

    Timestamps without an offset are taken to be UTC. Fractions of a second
    are truncated to microseconds.

    Examples
    --------
    >>> parse_timestamp("2011-03-01T10:15:00.5+01:00").isoformat()
    '2011-03-01T10:15:00.500000+01:00'
    >>> parse_timestamp("2011-03-01T10:15:00Z").isoformat()
    '2011-03-01T10:15:00+00:00'
    """
    match = _TIMESTAMP_RE.fullmatch(text.strip())
    if match is None:
        raise ValueError(f"{text!r} is not an RFC-3339 timestamp")

    date, time, fraction, offset = match.group("date", "time", "fraction", "offset")
    # fromisoformat before Python 3.11 takes neither "Z" nor more than six digits
    micro = (fraction or "0")[:6].ljust(6, "0")
    if offset is None or offset in ("Z", "z"):
        offset = "+00:00"
    try:
        return datetime.fromisoformat(f"{date}T{time}.{micro}{offset}")
    except ValueError as exc:
        raise ValueError(f"{text!r} is not an RFC-3339 timestamp: {exc}") from None


def parse_value(text: str, attr_type: AttributeType) -> AttributeValue:
    """Convert the textual form of a value to ``attr_type``.

    An empty string is :data:`MISSING`. Raises ``ValueError`` if the text is
    not a valid value of the type.
    """
    if text == "":
        return MISSING

    if attr_type is AttributeType.BOOLEAN:
        try:
            return _BOOLEANS[text.strip().lower()]
        except KeyError:
            raise ValueError(f"{text!r} is not a boolean") from None
    if attr_type is AttributeType.INTEGER:
        if not _INTEGER_RE.fullmatch(text.strip()):
            raise ValueError(f"{text!r} is not an integer")
        return int(text)
    if attr_type is AttributeType.REAL:
        if not _REAL_RE.fullmatch(text.strip()):
            raise ValueError(f"{text!r} is not a real number")
        return float(text)
    if attr_type is AttributeType.TIMESTAMP:
        return parse_timestamp(text)
    return text


def format_value(value: AttributeValue) -> str:
    """Inverse of :func:`parse_value`: the textual form of a value."""
    if value is MISSING:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, datetime):
        return value.isoformat()
    return str(value)


def _accepts(attr_type: AttributeType, texts: Iterable[str]) -> bool:
    for text in texts:
        try:
            parse_value(text, attr_type)
        except ValueError:
            return False
    return True


def infer_type(texts: Iterable[str]) -> AttributeType:
    """Narrowest type consistent with every non-empty value.

    Examples
    --------
    >>> infer_type(["1", "2", ""])
    <AttributeType.INTEGER: 'integer'>
    >>> infer_type(["1", "2.5"])
    <AttributeType.REAL: 'real'>
    >>> infer_type(["d1", "2"])
    <AttributeType.TEXT: 'text'>
    """
    present = [text for text in texts if text != ""]
    if not present:
        # nothing to go by
        return AttributeType.TEXT
    for attr_type in INFERENCE_ORDER:
        if _accepts(attr_type, present):
            return attr_type
    return AttributeType.TEXT


def merge_declared(attribute: str, types: Iterable[AttributeType]) -> AttributeType:
    """Combine the types one attribute is declared with.

    ``integer`` and ``real`` widen to ``real``; any other mix raises
    :class:`SchemaError`.
    """
    distinct = set(types)
    if len(distinct) == 1:
        return distinct.pop()
    if distinct == {AttributeType.INTEGER, AttributeType.REAL}:
        return AttributeType.REAL
    raise SchemaError(attribute, distinct)


def resolve_type(attr_type: AttributeType, texts: Iterable[str]) -> AttributeType:
    """Demote ``attr_type`` to text if one of the values does not fit it."""
    texts = list(texts)
    if attr_type is AttributeType.TEXT or _accepts(attr_type, texts):
        return attr_type
    return AttributeType.TEXT
