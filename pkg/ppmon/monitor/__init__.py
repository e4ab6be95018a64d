"""Online monitoring of running cases with a trained predictive model."""

from ._monitor import (
    CaseState,
    CaseStatus,
    Monitor,
    MonitorVerdict,
    RuntimeConfig,
    VerdictKind,
    on_case_end,
    on_event,
)
from ._serve import (
    MonitorServer,
    handle_line,
    handle_message,
    make_server,
    parse_event,
    serve_stream,
    serve_tcp,
)

__all__ = [
    "CaseState",
    "CaseStatus",
    "Monitor",
    "MonitorServer",
    "MonitorVerdict",
    "RuntimeConfig",
    "VerdictKind",
    "handle_line",
    "handle_message",
    "make_server",
    "on_case_end",
    "on_event",
    "parse_event",
    "serve_stream",
    "serve_tcp",
]
