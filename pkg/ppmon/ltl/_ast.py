"""Formula trees of linear temporal logic over finite traces.

Every node is an immutable, hashable dataclass. ``str(formula)`` gives the
canonical text, which :func:`~ppmon.ltl.parse_formula` reads back into an
equal tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator

# binding strength, higher binds tighter
PRECEDENCE = {
    "->": 1,
    "||": 2,
    "&&": 3,
    "U": 4,
}
UNARY_PRECEDENCE = 5


class Formula:
    """Base class of all formula nodes."""

    precedence = UNARY_PRECEDENCE

    def children(self) -> tuple["Formula", ...]:
        return ()

    def walk(self) -> Iterator["Formula"]:
        """All subformulas, children before parents."""
        for child in self.children():
            yield from child.walk()
        yield self

    @property
    def depth(self) -> int:
        return 1 + max((child.depth for child in self.children()), default=0)

    def atoms(self) -> set[str]:
        return {node.name for node in self.walk() if isinstance(node, Atom)}


@dataclass(frozen=True)
class Atom(Formula):
    """Holds at a position whose activity label equals ``name``."""

    name: str

    def __str__(self) -> str:
        return json.dumps(self.name, ensure_ascii=False)


@dataclass(frozen=True)
class Literal(Formula):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Literal(True)
FALSE = Literal(False)


@dataclass(frozen=True)
class Unary(Formula):
    arg: Formula
    symbol = ""

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)

    def __str__(self) -> str:
        return f"{self.symbol}({self.arg})"


@dataclass(frozen=True)
class Not(Unary):
    symbol = "!"

    def __str__(self) -> str:
        if self.arg.precedence < UNARY_PRECEDENCE:
            return f"!({self.arg})"
        return f"!{self.arg}"


@dataclass(frozen=True)
class Next(Unary):
    """Strong next: false at the last position."""

    symbol = "X"


@dataclass(frozen=True)
class Eventually(Unary):
    symbol = "F"


@dataclass(frozen=True)
class Always(Unary):
    symbol = "G"


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula
    symbol = ""
    right_associative = False

    @property
    def precedence(self) -> int:  # type: ignore[override]
        return PRECEDENCE[self.symbol]

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def _wrap(self, child: Formula, is_right: bool) -> str:
        if child.precedence > self.precedence:
            return str(child)
        if child.precedence == self.precedence and is_right == self.right_associative:
            # the grammar already groups this way
            return str(child)
        return f"({child})"

    def __str__(self) -> str:
        left = self._wrap(self.left, is_right=False)
        right = self._wrap(self.right, is_right=True)
        return f"{left} {self.symbol} {right}"


@dataclass(frozen=True)
class And(Binary):
    symbol = "&&"


@dataclass(frozen=True)
class Or(Binary):
    symbol = "||"


@dataclass(frozen=True)
class Implies(Binary):
    symbol = "->"
    right_associative = True


@dataclass(frozen=True)
class Until(Binary):
    symbol = "U"
    right_associative = True

    def __str__(self) -> str:
        return f"({self.left}) U ({self.right})"
