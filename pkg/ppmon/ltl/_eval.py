from __future__ import annotations

import enum
from typing import Callable, Dict, List, Sequence, Union

from ppmon.log import Trace

from ._ast import (
    Always,
    And,
    Atom,
    Eventually,
    Formula,
    Implies,
    Literal,
    Next,
    Not,
    Or,
    Until,
)


class OutcomeLabel(str, enum.Enum):
    """Whether a completed trace satisfies the monitored predicate."""

    COMPLIANT = "compliant"
    NON_COMPLIANT = "non_compliant"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_bool(cls, satisfied: bool) -> "OutcomeLabel":
        return cls.COMPLIANT if satisfied else cls.NON_COMPLIANT


# a formula, or any function of a completed trace returning a bool or a label
LabelingFunction = Callable[[Trace], Union[bool, OutcomeLabel]]


def _table(formula: Formula, labels: Sequence[str], cache: Dict) -> List[bool]:
    # truth value at every position 0..n, position n being the empty suffix
    if formula in cache:
        return cache[formula]

    n = len(labels)
    if isinstance(formula, Atom):
        table = [label == formula.name for label in labels] + [False]
    elif isinstance(formula, Literal):
        table = [formula.value] * n + [formula.value]
    elif isinstance(formula, Not):
        table = [not value for value in _table(formula.arg, labels, cache)]
    elif isinstance(formula, Next):
        arg = _table(formula.arg, labels, cache)
        table = [i + 1 < n and arg[i + 1] for i in range(n)] + [False]
    elif isinstance(formula, Eventually):
        arg = _table(formula.arg, labels, cache)
        table = [False] * (n + 1)
        for i in reversed(range(n)):
            table[i] = arg[i] or table[i + 1]
    elif isinstance(formula, Always):
        arg = _table(formula.arg, labels, cache)
        table = [True] * (n + 1)
        for i in reversed(range(n)):
            table[i] = arg[i] and table[i + 1]
    elif isinstance(formula, Until):
        left = _table(formula.left, labels, cache)
        right = _table(formula.right, labels, cache)
        table = [False] * (n + 1)
        for i in reversed(range(n)):
            table[i] = right[i] or (left[i] and table[i + 1])
    elif isinstance(formula, (And, Or, Implies)):
        left = _table(formula.left, labels, cache)
        right = _table(formula.right, labels, cache)
        if isinstance(formula, And):
            table = [a and b for a, b in zip(left, right)]
        elif isinstance(formula, Or):
            table = [a or b for a, b in zip(left, right)]
        else:
            table = [not a or b for a, b in zip(left, right)]
    else:
        raise TypeError(f"Cannot evaluate {type(formula).__name__} nodes.")

    cache[formula] = table
    return table


def evaluate(formula: Formula, trace: Trace | Sequence[str]) -> bool:
    """Whether a completed trace satisfies ``formula`` from its first event.

    Every subformula is evaluated once per position, backwards from the end
    of the trace, which takes time linear in both sizes. On the empty trace
    the formula is judged on the empty suffix: ``G`` holds there, atoms, ``F``,
    ``X`` and ``U`` do not.

    Parameters
    ----------
    formula : Formula
        The predicate.

    trace : Trace or sequence of str
        The trace, or just its activity labels.

    Returns
    -------
    satisfied : bool

    Examples
    --------
    >>> from ppmon.ltl import parse_formula
    >>> evaluate(parse_formula('F("a")'), ["b", "a", "c"])
    True
    >>> evaluate(parse_formula('G("a" -> F("b"))'), ["a"])
    False
    """
    labels = trace.activities if isinstance(trace, Trace) else tuple(trace)
    return _table(formula, labels, {})[0]


def label_trace(formula: Formula, trace: Trace) -> OutcomeLabel:
    """Label a completed trace by whether it satisfies ``formula``."""
    return OutcomeLabel.from_bool(evaluate(formula, trace))


def make_labeler(
    predicate: Formula | LabelingFunction,
) -> Callable[[Trace], OutcomeLabel]:
    """Turn a formula or a custom classification function into a labeler.

    Custom functions may return either a bool (``True`` meaning compliant) or
    an :class:`OutcomeLabel`.
    """
    if isinstance(predicate, Formula):
        return lambda trace: label_trace(predicate, trace)  # type: ignore[arg-type]

    if not callable(predicate):
        raise TypeError(
            "Expected a formula or a callable labeling traces, got "
            f"{type(predicate).__name__} instead."
        )

    def labeler(trace: Trace) -> OutcomeLabel:
        outcome = predicate(trace)  # type: ignore[operator]
        if isinstance(outcome, OutcomeLabel):
            return outcome
        return OutcomeLabel.from_bool(bool(outcome))

    return labeler
