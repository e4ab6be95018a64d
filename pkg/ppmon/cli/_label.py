from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, TextIO

import pandas as pd

from ppmon.cli._utils import (
    add_config_argument,
    add_log_arguments,
    add_verbose_argument,
    configure_logging,
    load_log,
)
from ppmon.evaluation import gold_standard
from ppmon.log import EventLog
from ppmon.ltl import OutcomeLabel, parse_formula

REQUIRED = ("log", "formula")


def _label_log(
    log: EventLog,
    formula: str,
    sink: TextIO,
    logger: logging.Logger = logging.getLogger(__name__),
) -> None:
    """Write ``case_id,label`` for every trace of ``log`` as CSV."""
    gold = gold_standard(log, parse_formula(formula))
    frame = pd.DataFrame(
        {"case_id": list(gold), "label": [label.value for label in gold.values()]}
    )
    frame.to_csv(sink, index=False)
    n_compliant = sum(label is OutcomeLabel.COMPLIANT for label in gold.values())
    logger.info(f"{n_compliant} of {len(gold)} traces satisfy {formula}")


def format_parser(
    parser: Optional[argparse.ArgumentParser] = None,
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the label method."""

    if not parser:  # used in tests
        parser = argparse.ArgumentParser()

    parser_subgroup = parser.add_argument_group("label")
    add_log_arguments(parser_subgroup)
    parser_subgroup.add_argument(
        "--formula", help='The predicate to evaluate, e.g. \'F("a")\'.'
    )
    parser_subgroup.add_argument(
        "-o",
        "--output",
        default=None,
        help="Write the labels to this CSV file instead of standard output.",
    )
    add_config_argument(parser_subgroup)
    add_verbose_argument(parser_subgroup)
    return parser


def main(parsed_args: argparse.Namespace) -> None:
    configure_logging(parsed_args.loglevel)
    log = load_log(parsed_args)
    if parsed_args.output is None:
        _label_log(log, parsed_args.formula, sys.stdout)
        return
    with open(parsed_args.output, "w", encoding="utf-8", newline="") as f:
        _label_log(log, parsed_args.formula, f)
