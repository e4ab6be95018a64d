from __future__ import annotations

import argparse
import logging
import pathlib
from typing import Any, Dict, Optional

from ppmon.cli._utils import (
    add_config_argument,
    add_log_arguments,
    add_verbose_argument,
    configure_logging,
    load_log,
)
from ppmon.encoding import training_matrix
from ppmon.log import EventLog
from ppmon.pipeline import INSTANCES, TrainingConfig, encode_log, save_model, train

REQUIRED = ("log", "formula", "out")

# options of a single technique, None keeps the default of TrainingConfig
INSTANCE_OPTIONS = (
    "k_min",
    "k_max",
    "eps",
    "min_points",
    "trees_count",
    "features_per_split",
)


def add_training_arguments(group, several: bool = False) -> None:
    """Options of :class:`~ppmon.pipeline.TrainingConfig`.

    With ``several``, ``--instance`` and ``--gap`` take lists.
    """
    nargs = "+" if several else None
    group.add_argument(
        "--formula", help='The monitored predicate, e.g. \'F("a") && G(!"b")\'.'
    )
    group.add_argument(
        "--instance",
        choices=sorted(INSTANCES),
        nargs=nargs,
        default=["mbased_dt"] if several else "mbased_dt",
        help="Clustering and classifier combination (default: %(default)s).",
    )
    group.add_argument(
        "--gap",
        type=int,
        nargs=nargs,
        default=[5] if several else 5,
        help="Prefixes of length 1, 1 + GAP, ... are used (default: %(default)s).",
    )
    group.add_argument(
        "--max-prefix",
        type=int,
        dest="max_length",
        default=21,
        help="Longest prefix used for training (default: 21).",
    )
    group.add_argument(
        "--k-min", type=int, help="Model-based clustering: fewest clusters (15)."
    )
    group.add_argument(
        "--k-max", type=int, help="Model-based clustering: most clusters (35)."
    )
    group.add_argument(
        "--eps", type=float, help="DBSCAN: radius in normalized edit distance (0.125)."
    )
    group.add_argument(
        "--min-points", type=int, help="DBSCAN: core point threshold (4)."
    )
    group.add_argument(
        "--min-leaf", type=int, default=2, help="Minimum tree leaf size (default: 2)."
    )
    group.add_argument(
        "--trees",
        type=int,
        dest="trees_count",
        help="Random forest: number of trees (100).",
    )
    group.add_argument(
        "--features-per-split",
        type=int,
        help="Random forest: attributes drawn per split (square root of their "
        "count).",
    )
    group.add_argument(
        "--seed",
        type=int,
        default=42,
        help="Seed of the clustering and of the forests (default: 42).",
    )
    group.add_argument(
        "--jobs",
        type=int,
        default=None,
        dest="n_jobs",
        help="Threads used for training.",
    )


def training_params(parsed_args: argparse.Namespace) -> Dict[str, Any]:
    """Training options as keyword arguments of ``TrainingConfig``, without
    ``instance`` and ``gap``."""
    params = {
        "formula": parsed_args.formula,
        "max_length": parsed_args.max_length,
        "min_leaf": parsed_args.min_leaf,
        "seed": parsed_args.seed,
    }
    for name in INSTANCE_OPTIONS:
        params[name] = getattr(parsed_args, name)
    return params


def _train_file(
    log: EventLog,
    config: TrainingConfig,
    output_file: pathlib.Path,
    matrix_file: Optional[pathlib.Path] = None,
    n_jobs: Optional[int] = None,
    logger: logging.Logger = logging.getLogger(__name__),
) -> None:
    """Train a model on ``log`` and save it; optionally write the training
    matrix as CSV."""
    model = train(log, config, n_jobs=n_jobs)
    save_model(model, output_file)
    logger.info(
        f"Wrote {config.instance} model with {model.n_clusters} clusters to "
        f"{output_file}"
    )

    if matrix_file is not None:
        prefixes = encode_log(log, config, alphabet=model.alphabet)
        matrix = training_matrix(
            prefixes, log.attribute_schema, list(model.clusters.labels)
        )
        matrix.to_csv(matrix_file, index=False)
        logger.info(f"Wrote {len(matrix)} training rows to {matrix_file}")


def format_parser(
    parser: Optional[argparse.ArgumentParser] = None,
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the train method."""

    if not parser:  # used in tests
        parser = argparse.ArgumentParser()

    parser_subgroup = parser.add_argument_group("train")
    add_log_arguments(parser_subgroup)
    add_training_arguments(parser_subgroup)
    parser_subgroup.add_argument("--out", help="Path of the model file to write.")
    parser_subgroup.add_argument(
        "--matrix",
        default=None,
        help="Also write the training matrix (one row per prefix) to this CSV.",
    )
    add_config_argument(parser_subgroup)
    add_verbose_argument(parser_subgroup)
    return parser


def main(parsed_args: argparse.Namespace) -> None:
    configure_logging(parsed_args.loglevel)
    config = TrainingConfig.from_instance(
        parsed_args.instance, gap=parsed_args.gap, **training_params(parsed_args)
    )
    matrix_file = None
    if parsed_args.matrix is not None:
        matrix_file = pathlib.Path(parsed_args.matrix)
    log = load_log(parsed_args)
    _train_file(
        log,
        config,
        output_file=pathlib.Path(parsed_args.out),
        matrix_file=matrix_file,
        n_jobs=parsed_args.n_jobs,
    )
