class FormulaSyntaxError(ValueError):
    """Raise when a formula cannot be parsed.

    ``position`` is the 0-based offset in the formula text where parsing
    stopped.
    """

    def __init__(self, msg: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{msg} at position {position}:\n{text}\n{pointer}")
