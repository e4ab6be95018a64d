from __future__ import annotations

import argparse
from typing import Any, Dict, List, Optional

import ppmon.cli._evaluate
import ppmon.cli._inspect
import ppmon.cli._label
import ppmon.cli._serve
import ppmon.cli._train
from ppmon.cli._utils import (
    EXIT_USAGE,
    ArgumentParser,
    check_required,
    read_config_file,
    run,
)
from ppmon.pipeline.exceptions import ConfigurationError


def apply_config(
    parser: argparse.ArgumentParser, values: Dict[str, Any], path: str
) -> None:
    """Make the values of a config file the defaults of ``parser``."""
    actions = {
        action.dest: action
        for action in parser._actions
        if action.dest not in ("help", "config", "func")
    }
    unknown = sorted(set(values) - set(actions))
    if unknown:
        raise ConfigurationError(f"Unknown options in {path}: {unknown}.")

    defaults = {}
    for dest, value in values.items():
        if actions[dest].nargs == "+" and not isinstance(value, list):
            value = [value]
        defaults[dest] = value
    parser.set_defaults(**defaults)


def main_cli(command_line_args: Optional[List[str]] = None) -> int:
    """Main command line interface entrypoint for all command line ppmon methods.

    Returns the exit code: 0 on success, 1 on usage errors, 2 on data errors
    and 3 on training errors.

    To add a new entrypoint:
        1. Create a new method to call that accepts a namespace
        2. Create a new subparser formatter to define the expected CL arguments
        3. Add those to the function map, with the options it cannot run
           without.
    """
    entry_parser = ArgumentParser(
        prog="ppmon",
        description="Predictive monitoring of business process constraints.",
        add_help=True,
    )

    subparsers = entry_parser.add_subparsers(
        title="Commands",
        description="ppmon command to call",
        dest="cmd",
        help="Sub-commands help",
    )

    # function_map should map a command to
    #   method: the command to call (gets set to default 'func')
    #   format_parser: the function used to create a subparser for that command
    #   required: options that must be set, on the command line or in --config
    function_map = {
        "label": {
            "method": ppmon.cli._label.main,
            "format_parser": ppmon.cli._label.format_parser,
            "required": ppmon.cli._label.REQUIRED,
            "help": "Label every trace of a log with a formula.",
        },
        "train": {
            "method": ppmon.cli._train.main,
            "format_parser": ppmon.cli._train.format_parser,
            "required": ppmon.cli._train.REQUIRED,
            "help": "Train a predictive model and save it.",
        },
        "evaluate": {
            "method": ppmon.cli._evaluate.main,
            "format_parser": ppmon.cli._evaluate.format_parser,
            "required": ppmon.cli._evaluate.REQUIRED,
            "help": "Train on the start of a log and replay the rest.",
        },
        "sweep": {
            "method": ppmon.cli._evaluate.main,
            "format_parser": ppmon.cli._evaluate.format_sweep_parser,
            "required": ppmon.cli._evaluate.REQUIRED,
            "help": "Evaluate every instance over a grid of gaps and gates.",
        },
        "serve": {
            "method": ppmon.cli._serve.main,
            "format_parser": ppmon.cli._serve.format_parser,
            "required": ppmon.cli._serve.REQUIRED,
            "help": "Monitor running cases from standard input or over TCP.",
        },
        "inspect": {
            "method": ppmon.cli._inspect.main,
            "format_parser": ppmon.cli._inspect.format_parser,
            "required": ppmon.cli._inspect.REQUIRED,
            "help": "Show the clusters and trees of a trained model.",
        },
    }

    commands = {}
    for func_name, values in function_map.items():
        # Add subparser for each function in func map,
        # and assigns default func to be "method" from function_map
        subparser = subparsers.add_parser(func_name, help=values["help"])
        subparser.set_defaults(func=values["method"])
        values["format_parser"](subparser)
        commands[func_name] = subparser

    # Parse arguments with arg parser for given function in function map,
    # Then call the matching method in the function_map with the argument namespace
    try:
        args = entry_parser.parse_args(command_line_args)
        if args.cmd is None:
            entry_parser.error("a command is required")

        subparser = commands[args.cmd]
        if args.config is not None:
            try:
                apply_config(subparser, read_config_file(args.config), args.config)
            except (ConfigurationError, OSError) as exc:
                subparser.error(str(exc))
            # flags on the command line win over the file
            args = entry_parser.parse_args(command_line_args)

        check_required(subparser, args, function_map[args.cmd]["required"])
    except SystemExit as exc:
        return EXIT_USAGE if exc.code is None else int(exc.code)

    return run(args.func, args)
