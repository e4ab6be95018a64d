from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Tuple

from ppmon.cli._utils import (
    add_config_argument,
    add_runtime_arguments,
    add_verbose_argument,
    configure_logging,
    runtime_config,
)
from ppmon.monitor import Monitor, serve_stream, serve_tcp
from ppmon.pipeline import load_model

REQUIRED = ("model",)


def parse_address(text: str) -> Tuple[str, int]:
    """``HOST:PORT`` or ``:PORT``; an empty host means 127.0.0.1.

    Examples
    --------
    >>> parse_address("0.0.0.0:7000")
    ('0.0.0.0', 7000)
    >>> parse_address(":7000")
    ('127.0.0.1', 7000)
    """
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit() or int(port) > 65535:
        raise argparse.ArgumentTypeError(
            f"expected HOST:PORT with a port number, got {text!r}"
        )
    return host or "127.0.0.1", int(port)


def _serve(
    parsed_args: argparse.Namespace,
    logger: logging.Logger = logging.getLogger(__name__),
) -> None:
    config = runtime_config(
        parsed_args.min_support, parsed_args.min_prob, parsed_args.interval
    )
    model = load_model(parsed_args.model)
    logger.info(
        f"Loaded {model.instance} model with {model.n_clusters} clusters from "
        f"{parsed_args.model}"
    )
    monitor = Monitor(model, config)

    if parsed_args.listen is None:
        logger.info("Reading events from standard input")
        written = serve_stream(monitor, sys.stdin, sys.stdout)
        logger.info(f"Wrote {written} messages, {monitor.open_cases} cases open")
        return

    host, port = parsed_args.listen
    serve_tcp(monitor, host, port)


def format_parser(
    parser: Optional[argparse.ArgumentParser] = None,
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the serve method."""

    if not parser:  # used in tests
        parser = argparse.ArgumentParser()

    parser_subgroup = parser.add_argument_group("serve")
    parser_subgroup.add_argument("--model", help="Path of a trained model file.")
    add_runtime_arguments(parser_subgroup)

    source = parser_subgroup.add_mutually_exclusive_group()
    source.add_argument(
        "--listen",
        type=parse_address,
        default=None,
        metavar="HOST:PORT",
        help="Serve newline delimited JSON over TCP on this address.",
    )
    source.add_argument(
        "--stdin",
        action="store_true",
        help="Read events from standard input and write verdicts to standard "
        "output. This is the default when --listen is not given.",
    )
    add_config_argument(parser_subgroup)
    add_verbose_argument(parser_subgroup)
    return parser


def main(parsed_args: argparse.Namespace) -> None:
    configure_logging(parsed_args.loglevel)
    _serve(parsed_args)
