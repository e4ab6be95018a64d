"""Newline-delimited JSON front end of the monitor, on a stream or a socket.

Inbound lines are ``{"type": "event", "case": ..., "activity": ...,
"timestamp": ..., "attrs": {...}}`` and ``{"type": "end", "case": ...}``;
every verdict is written back as one JSON line.
"""

from __future__ import annotations

import json
import logging
import socketserver
import time
from datetime import datetime
from typing import Any, Dict, Iterable, Mapping, Optional, TextIO, Tuple

from ppmon.log import MISSING, AttributeType, AttributeValue, Event
from ppmon.log._schema import parse_timestamp, parse_value

from ._monitor import Monitor
from .exceptions import MessageError

logger = logging.getLogger(__name__)


def _coerce(name: str, value: Any, attr_type: Optional[AttributeType]):
    if value is None:
        return MISSING
    if attr_type is None:
        # not part of the model, invisible to the classifiers
        return value
    if isinstance(value, str):
        try:
            return parse_value(value, attr_type)
        except ValueError as exc:
            raise MessageError(f"Attribute {name!r}: {exc}") from None

    if attr_type is AttributeType.BOOLEAN and isinstance(value, bool):
        return value
    if attr_type is AttributeType.INTEGER and isinstance(value, int):
        if not isinstance(value, bool):
            return value
    if attr_type is AttributeType.REAL and isinstance(value, (int, float)):
        if not isinstance(value, bool):
            return float(value)
    if attr_type is AttributeType.TEXT and isinstance(value, (int, float)):
        return str(value).lower() if isinstance(value, bool) else str(value)
    raise MessageError(
        f"Attribute {name!r} expects a {attr_type} value, got {value!r}."
    )


def parse_event(
    message: Mapping[str, Any], schema: Mapping[str, AttributeType]
) -> Tuple[str, Event]:
    """Build the case id and event of an inbound event message.

    Attribute values are converted to the type the model knows them by;
    ``null`` stands for a missing value.
    """
    case_id = message.get("case")
    if not isinstance(case_id, str) or not case_id:
        raise MessageError("An event message needs a non-empty string 'case'.")
    activity = message.get("activity")
    if not isinstance(activity, str) or not activity:
        raise MessageError("An event message needs a non-empty string 'activity'.")
    timestamp = message.get("timestamp")
    if not isinstance(timestamp, str):
        raise MessageError("An event message needs an RFC-3339 'timestamp'.")
    try:
        when: datetime = parse_timestamp(timestamp)
    except ValueError as exc:
        raise MessageError(str(exc)) from None

    attrs = message.get("attrs") or {}
    if not isinstance(attrs, dict):
        raise MessageError("'attrs' must be an object.")
    values: Dict[str, AttributeValue] = {
        name: _coerce(name, value, schema.get(name)) for name, value in attrs.items()
    }
    return case_id, Event(activity, when, values)


def handle_message(monitor: Monitor, message: Any) -> Optional[Dict[str, Any]]:
    """Apply one decoded message to the monitor.

    Returns the outbound message, or ``None`` if the event did not lead to a
    verdict. Raises :class:`MessageError` for malformed messages.
    """
    if not isinstance(message, dict):
        raise MessageError("A message must be a JSON object.")
    kind = message.get("type")
    start = time.perf_counter()
    if kind == "event":
        case_id, event = parse_event(message, monitor.model.attribute_schema)
        verdict = monitor.event(case_id, event)
    elif kind == "end":
        case_id = message.get("case")
        if not isinstance(case_id, str) or not case_id:
            raise MessageError("An end message needs a non-empty string 'case'.")
        verdict = monitor.end(case_id)
    else:
        raise MessageError(f"Unknown message type {kind!r}, use 'event' or 'end'.")

    if verdict is None:
        return None
    return verdict.to_message(latency_ms=(time.perf_counter() - start) * 1000)


def handle_line(monitor: Monitor, line: str) -> Optional[str]:
    """Answer one inbound line; blank lines are skipped.

    A line that is not valid JSON, or not a valid message, is answered with
    ``{"error": ...}``, and so is a message the monitor fails on; the
    failure is logged and the other cases carry on.
    """
    line = line.strip()
    if not line:
        return None
    try:
        answer = handle_message(monitor, json.loads(line))
    except json.JSONDecodeError as exc:
        logger.warning(f"Malformed message: {exc}")
        answer = {"error": f"invalid JSON: {exc}"}
    except MessageError as exc:
        logger.warning(f"Rejected message: {exc}")
        answer = {"error": str(exc)}
    except Exception as exc:
        logger.exception(f"Failed to process message {line!r}")
        answer = {"error": f"internal error: {type(exc).__name__}: {exc}"}
    if answer is None:
        return None
    return json.dumps(answer)


def serve_stream(monitor: Monitor, source: Iterable[str], sink: TextIO) -> int:
    """Serve the protocol from an iterable of lines, e.g. standard input.

    Every answer is flushed as soon as it is written. Returns the number of
    lines written.
    """
    written = 0
    for line in source:
        answer = handle_line(monitor, line)
        if answer is None:
            continue
        sink.write(answer + "\n")
        sink.flush()
        written += 1
    logger.info(f"Stream closed, {written} answers, {monitor.open_cases} open cases")
    return written


class MonitorRequestHandler(socketserver.StreamRequestHandler):
    """One client connection; its lines go to the server's shared monitor."""

    def handle(self) -> None:
        peer = "%s:%s" % self.client_address[:2]
        logger.info(f"Client {peer} connected")
        monitor: Monitor = self.server.monitor  # type: ignore[attr-defined]
        for raw in self.rfile:
            answer = handle_line(monitor, raw.decode("utf-8", errors="replace"))
            if answer is None:
                continue
            try:
                self.wfile.write((answer + "\n").encode("utf-8"))
                self.wfile.flush()
            except OSError:
                logger.info(f"Client {peer} went away")
                return
        logger.info(f"Client {peer} disconnected")


class MonitorServer(socketserver.ThreadingTCPServer):
    """Threading TCP server sharing one :class:`Monitor` between clients."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: Tuple[str, int], monitor: Monitor) -> None:
        self.monitor = monitor
        super().__init__(address, MonitorRequestHandler)


def make_server(monitor: Monitor, host: str = "127.0.0.1", port: int = 0):
    """Bind a :class:`MonitorServer`; port 0 picks a free port, see
    ``server.server_address``."""
    return MonitorServer((host, port), monitor)


def serve_tcp(monitor: Monitor, host: str = "127.0.0.1", port: int = 0) -> None:
    """Serve clients until interrupted."""
    with make_server(monitor, host, port) as server:
        bound_host, bound_port = server.server_address[:2]
        logger.info(f"Listening on {bound_host}:{bound_port}")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            logger.info("Interrupted, shutting down")
