from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import List

from ._ast import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Implies,
    Next,
    Not,
    Or,
    Until,
)
from .exceptions import FormulaSyntaxError

_TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<op>&&|\|\||->|!|\(|\))
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

UNARY = {"!": Not, "X": Next, "F": Eventually, "G": Always}
KEYWORDS = {"X", "F", "G", "U", "true", "false"}


@dataclass
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN_RE.match(text, position)
        if match is None:
            raise FormulaSyntaxError(
                f"Unexpected character {text[position]!r}", text, position
            )
        kind = match.lastgroup
        if kind == "word" and match.group() not in KEYWORDS:
            raise FormulaSyntaxError(
                f"Unknown keyword {match.group()!r}, activity names must be quoted",
                text,
                position,
            )
        if kind != "space":
            token = Token(kind, match.group(), position)  # type: ignore[arg-type]
            tokens.append(token)
        position = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    # implies := or ("->" implies)?
    # or      := and ("||" and)*
    # and     := until ("&&" until)*
    # until   := unary ("U" until)?
    # unary   := ("!" | "X" | "F" | "G") unary | primary
    # primary := string | "true" | "false" | "(" implies ")"

    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def error(self, msg: str) -> FormulaSyntaxError:
        return FormulaSyntaxError(msg, self.text, self.current.position)

    def accept(self, text: str) -> bool:
        if self.current.kind != "string" and self.current.text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.current.text or "end of formula"
            raise self.error(f"Expected {text!r}, found {found!r}")

    def parse(self) -> Formula:
        formula = self.implies()
        if self.current.kind != "end":
            raise self.error(f"Unexpected {self.current.text!r}")
        return formula

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        formula = self.conjunction()
        while self.accept("||"):
            formula = Or(formula, self.conjunction())
        return formula

    def conjunction(self) -> Formula:
        formula = self.until()
        while self.accept("&&"):
            formula = And(formula, self.until())
        return formula

    def until(self) -> Formula:
        left = self.unary()
        if self.accept("U"):
            return Until(left, self.until())
        return left

    def unary(self) -> Formula:
        token = self.current
        if token.kind in ("op", "word") and token.text in UNARY:
            self.index += 1
            return UNARY[token.text](self.unary())
        return self.primary()

    def primary(self) -> Formula:
        token = self.current
        if token.kind == "string":
            self.index += 1
            try:
                name = json.loads(token.text)
            except json.JSONDecodeError as exc:
                raise FormulaSyntaxError(
                    f"Invalid activity name: {exc.msg}", self.text, token.position
                ) from None
            if not name:
                raise FormulaSyntaxError(
                    "Empty activity name", self.text, token.position
                )
            return Atom(name)
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            formula = self.implies()
            self.expect(")")
            return formula
        found = token.text or "end of formula"
        raise self.error(f"Expected a formula, found {found!r}")


def parse_formula(text: str) -> Formula:
    """Parse the text of an LTL formula over finite traces.

    Activities are double-quoted strings. The operators are, from the
    tightest to the loosest binding: the unary ``!``, ``X`` (next), ``F``
    (eventually) and ``G`` (globally), then ``U`` (until), ``&&``, ``||`` and
    ``->``. ``true`` and ``false`` are constants.

    Parameters
    ----------
    text : str
        The formula.

    Returns
    -------
    formula : Formula
        The formula tree; ``str(formula)`` is its canonical text.

    Raises
    ------
    FormulaSyntaxError
        With the offset at which the text stopped making sense.

    Examples
    --------
    >>> parse_formula('F("a") || F("b")')
    Or(left=Eventually(arg=Atom(name='a')), right=Eventually(arg=Atom(name='b')))
    >>> str(parse_formula('G( "x"->F("y") )'))
    'G("x" -> F("y"))'
    """
    return _Parser(text).parse()
