from __future__ import annotations

from pathlib import Path
from typing import BinaryIO, Literal, Union

from ._csv import read_csv_log
from ._model import EventLog
from ._xes import read_xes_log

LogFormat = Literal["csv", "xes"]

READERS = {
    "csv": read_csv_log,
    "xes": read_xes_log,
}


def parse_log(source: Union[bytes, BinaryIO], format: LogFormat) -> EventLog:
    """Parse an event log from bytes or a binary file object.

    Parameters
    ----------
    source : bytes or binary file-like object
        The content of the log.

    format : {"csv", "xes"}
        The format of ``source``. ``"xes"`` is the subset of XES made of typed
        ``string``, ``int``, ``float``, ``boolean`` and ``date`` attributes.

    Returns
    -------
    log : EventLog
        The parsed log with its inferred attribute schema. An empty source
        gives an empty log.

    Raises
    ------
    LogParseError
        If the input is not well-formed; the error carries the line (CSV) or
        element (XES) where reading stopped.

    SchemaError
        If an XES attribute is declared with incompatible types.
    """
    if format not in READERS:
        raise ValueError(
            f"Unknown log format {format!r}, use one of {sorted(READERS)}."
        )
    data = source if isinstance(source, bytes) else source.read()
    return READERS[format](data)


def read_log(path: Union[str, Path], format: LogFormat | None = None) -> EventLog:
    """Read a log file; the format defaults to the file extension."""
    path = Path(path)
    if format is None:
        suffix = path.suffix.lower().lstrip(".")
        if suffix not in READERS:
            raise ValueError(
                f"Cannot tell the format of {path} from its extension, pass it "
                "explicitly."
            )
        format = suffix  # type: ignore[assignment]
    with open(path, "rb") as f:
        return parse_log(f, format)  # type: ignore[arg-type]
