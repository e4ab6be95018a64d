from __future__ import annotations


class LogParseError(ValueError):
    """Raise when an event log cannot be read.

    ``line`` is set for CSV input, ``element`` for XES input (a path such as
    ``trace[3]/event[1]``). Either may be ``None`` if the position is unknown.
    """

    def __init__(
        self, msg: str, *, line: int | None = None, element: str | None = None
    ):
        self.line = line
        self.element = element
        where = ""
        if line is not None:
            where = f" (line {line})"
        elif element is not None:
            where = f" (at {element})"
        super().__init__(f"{msg}{where}")


class SchemaError(TypeError):
    """Raise when one attribute is declared with incompatible types."""

    def __init__(self, attribute: str, types):
        self.attribute = attribute
        super().__init__(
            f"Attribute {attribute!r} is declared with conflicting types: "
            f"{sorted(str(t) for t in types)}."
        )
