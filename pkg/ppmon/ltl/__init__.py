"""Predicates over completed traces, written in LTL on finite traces."""

from ._ast import (
    FALSE,
    TRUE,
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
from ._eval import LabelingFunction, OutcomeLabel, evaluate, label_trace, make_labeler
from ._parser import parse_formula

__all__ = [
    "FALSE",
    "TRUE",
    "Always",
    "And",
    "Atom",
    "Eventually",
    "Formula",
    "Implies",
    "LabelingFunction",
    "Literal",
    "Next",
    "Not",
    "Or",
    "OutcomeLabel",
    "Until",
    "evaluate",
    "label_trace",
    "make_labeler",
    "parse_formula",
]
