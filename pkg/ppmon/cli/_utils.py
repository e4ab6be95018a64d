from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, Iterable

from ppmon.cluster.exceptions import ClusteringParameterError
from ppmon.io.exceptions import (
    CorruptModelError,
    ModelVersionError,
    UntrustedTypesFoundException,
)
from ppmon.log import read_log
from ppmon.log.exceptions import LogParseError, SchemaError
from ppmon.ltl.exceptions import FormulaSyntaxError
from ppmon.monitor import RuntimeConfig
from ppmon.pipeline.exceptions import ConfigurationError, TrainingError
from ppmon.tree.exceptions import TrainingDataError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRAINING = 3

# checked in order, the first match decides the exit code
ERROR_EXIT_CODES = [
    (ConfigurationError, EXIT_USAGE),
    (
        (
            LogParseError,
            SchemaError,
            FormulaSyntaxError,
            CorruptModelError,
            ModelVersionError,
            UntrustedTypesFoundException,
            OSError,
        ),
        EXIT_DATA,
    ),
    ((TrainingError, TrainingDataError, ClusteringParameterError), EXIT_TRAINING),
    (ValueError, EXIT_DATA),
]


def get_log_level(level: int = 0) -> int:
    """Takes in verbosity from a CLI entrypoint (number of times -v specified),
    and sets the logger to the required log level"""

    all_levels = [logging.WARNING, logging.INFO, logging.DEBUG]

    if level >= len(all_levels):
        level = len(all_levels) - 1
    elif level < 0:
        level = 0

    return all_levels[level]


def configure_logging(loglevel: int) -> None:
    logging.basicConfig(
        format="%(levelname)-8s: %(message)s",
        level=get_log_level(loglevel),
        stream=sys.stderr,
    )


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser exiting with status 1 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def add_verbose_argument(group) -> None:
    group.add_argument(
        "-v",
        "--verbose",
        help=(
            "Increases verbosity of logging. Can be used multiple times to increase "
            "verbosity further."
        ),
        action="count",
        dest="loglevel",
        default=0,
    )


def add_config_argument(group) -> None:
    group.add_argument(
        "--config",
        help=(
            "JSON file of option values keyed by their long name with dashes "
            "replaced by underscores, e.g. {\"min_prob\": 0.8}. Options given on "
            "the command line win over the file."
        ),
        default=None,
    )


def add_log_arguments(group) -> None:
    group.add_argument("--log", help="Path to the event log (CSV or XES).")
    group.add_argument(
        "--format",
        choices=["csv", "xes"],
        default=None,
        help="Format of the log; defaults to the file extension.",
    )


def add_runtime_arguments(group, min_prob_nargs=None) -> None:
    group.add_argument(
        "--min-support",
        type=int,
        default=6,
        help="Minimum class support of a reliable prediction (default: 6).",
    )
    group.add_argument(
        "--min-prob",
        type=float,
        default=0.7 if min_prob_nargs is None else [0.7],
        nargs=min_prob_nargs,
        help="Minimum class probability of a reliable prediction (default: "
        "%(default)s).",
    )
    group.add_argument(
        "--interval",
        type=int,
        default=5,
        help="Evaluate running cases every INTERVAL events, starting at the "
        "first one (default: 5).",
    )


def runtime_config(
    min_support: int, min_prob: float, interval: int
) -> RuntimeConfig:
    try:
        return RuntimeConfig(min_support, min_prob, interval)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None


def load_log(parsed_args: argparse.Namespace):
    training_log = read_log(parsed_args.log, parsed_args.format)
    logger.info(
        f"Read {len(training_log)} traces with {training_log.n_events} events and "
        f"{len(training_log.attribute_schema)} attributes from {parsed_args.log}"
    )
    return training_log


def read_config_file(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            values = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(values, dict):
        raise ConfigurationError(f"{path} must hold a JSON object.")
    return values


def check_required(
    parser: argparse.ArgumentParser,
    parsed_args: argparse.Namespace,
    required: Iterable[str],
) -> None:
    """Required options may come from the command line or the config file."""
    missing = [
        "--" + name.replace("_", "-")
        for name in required
        if getattr(parsed_args, name, None) is None
    ]
    if missing:
        parser.error(f"the following arguments are required: {', '.join(missing)}")


def run(method: Callable[[argparse.Namespace], None], parsed_args) -> int:
    """Call a command and turn its exceptions into exit codes."""
    try:
        method(parsed_args)
    except Exception as exc:
        for types, code in ERROR_EXIT_CODES:
            if isinstance(exc, types):
                logger.error(f"{type(exc).__name__}: {exc}")
                return code
        raise
    return EXIT_OK
