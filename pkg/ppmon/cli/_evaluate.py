from __future__ import annotations

import argparse
import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from tabulate import tabulate  # type: ignore

from ppmon.cli._train import INSTANCE_OPTIONS, add_training_arguments, training_params
from ppmon.cli._utils import (
    add_config_argument,
    add_log_arguments,
    add_runtime_arguments,
    add_verbose_argument,
    configure_logging,
    load_log,
    runtime_config,
)
from ppmon.evaluation import sweep, sweep_grid, write_report
from ppmon.log import temporal_split
from ppmon.pipeline._config import applicable_params
from ppmon.pipeline.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

REQUIRED = ("log", "formula")


def check_params(instances: Sequence[str], params: Dict[str, Any]) -> None:
    """Reject technique options that none of the chosen instances uses."""
    for name in INSTANCE_OPTIONS:
        if params.get(name) is None:
            continue
        if not any(name in applicable_params(i, {name: 1}) for i in instances):
            raise ConfigurationError(
                f"{name} does not apply to any of the instances {list(instances)}."
            )


def print_report(report: pd.DataFrame) -> None:
    print(
        tabulate(
            report,
            tablefmt="github",
            headers="keys",
            showindex=False,
            floatfmt=".4g",
        )
    )


def _evaluate_log(
    parsed_args: argparse.Namespace,
    logger: logging.Logger = logger,
) -> pd.DataFrame:
    """Train every configuration of the grid on the first part of the log and
    replay the rest against it."""
    min_probs: List[float] = list(parsed_args.min_prob)
    for min_prob in min_probs:
        runtime_config(parsed_args.min_support, min_prob, parsed_args.interval)
    if not 0 < parsed_args.split < 1:
        raise ConfigurationError(
            f"--split must be in (0, 1), got {parsed_args.split} instead."
        )

    params = training_params(parsed_args)
    check_params(parsed_args.instance, params)
    configs = sweep_grid(parsed_args.instance, parsed_args.gap, **params)

    log = load_log(parsed_args)
    training, testing = temporal_split(log, parsed_args.split)
    logger.info(
        f"Training on {len(training)} traces, testing on {len(testing)} traces"
    )
    return sweep(
        training,
        testing,
        configs,
        min_probs,
        min_support=parsed_args.min_support,
        evaluation_interval=parsed_args.interval,
        baseline=parsed_args.baseline,
        similarity_threshold=parsed_args.similarity,
        mode=parsed_args.mode,
        n_jobs=parsed_args.n_jobs,
    )


def format_parser(
    parser: Optional[argparse.ArgumentParser] = None,
    name: str = "evaluate",
    instances: Sequence[str] = ("mbased_dt",),
    gaps: Sequence[int] = (5,),
    min_probs: Sequence[float] = (0.7,),
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the evaluate method,
    and, with other defaults, for the sweep method."""

    if not parser:  # used in tests
        parser = argparse.ArgumentParser()

    parser_subgroup = parser.add_argument_group(name)
    add_log_arguments(parser_subgroup)
    parser_subgroup.add_argument(
        "--split",
        type=float,
        default=0.8,
        help="Share of the traces, in order of their start, used for training "
        "(default: 0.8).",
    )
    add_training_arguments(parser_subgroup, several=True)
    add_runtime_arguments(parser_subgroup, min_prob_nargs="+")
    parser_subgroup.add_argument(
        "--report",
        default=None,
        help="Write the report to this CSV file instead of printing a table.",
    )
    parser_subgroup.add_argument(
        "--baseline",
        action="store_true",
        help="Also evaluate the on-the-fly baseline.",
    )
    parser_subgroup.add_argument(
        "--similarity",
        type=float,
        default=0.8,
        help="Baseline similarity threshold; historical prefixes within a "
        "normalized edit distance of 1 - SIMILARITY are used (default: 0.8).",
    )
    parser_subgroup.add_argument(
        "--mode",
        choices=["serial", "parallel"],
        default="serial",
        help="Replay test traces one after the other or in threads "
        "(default: serial).",
    )
    add_config_argument(parser_subgroup)
    add_verbose_argument(parser_subgroup)
    parser.set_defaults(
        instance=list(instances), gap=list(gaps), min_prob=list(min_probs)
    )
    return parser


def format_sweep_parser(
    parser: Optional[argparse.ArgumentParser] = None,
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the sweep method."""
    return format_parser(
        parser,
        name="sweep",
        instances=("mbased_dt", "dbscan_dt", "mbased_rf", "dbscan_rf"),
        gaps=(3, 5, 10),
        min_probs=(0.6, 0.7, 0.8, 0.9),
    )


def main(parsed_args: argparse.Namespace) -> None:
    configure_logging(parsed_args.loglevel)
    report = _evaluate_log(parsed_args)
    if parsed_args.report is None:
        print_report(report)
    else:
        write_report(report, parsed_args.report)
        logger.info(f"Wrote {len(report)} rows to {parsed_args.report}")
