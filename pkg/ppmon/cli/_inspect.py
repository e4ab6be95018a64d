from __future__ import annotations

import argparse
import logging
from typing import Optional

from tabulate import tabulate  # type: ignore

from ppmon.cli._utils import (
    add_config_argument,
    add_runtime_arguments,
    add_verbose_argument,
    configure_logging,
)
from ppmon.io import get_untrusted_types
from ppmon.pipeline import PredictiveModel, load_model
from ppmon.tree import render_tree

REQUIRED = ("model",)


def cluster_table(model: PredictiveModel) -> str:
    rows = []
    for stats in model.stats:
        classifier = model.classifiers.get(stats.cluster_id)
        rows.append(
            [
                stats.cluster_id,
                stats.rows,
                stats.compliant,
                stats.non_compliant,
                "-" if classifier is None else type(classifier).__name__,
            ]
        )
    headers = ["cluster", "rows", "compliant", "non_compliant", "classifier"]
    return tabulate(rows, tablefmt="github", headers=headers, showindex=False)


def _inspect_model(
    parsed_args: argparse.Namespace,
    logger: logging.Logger = logging.getLogger(__name__),
) -> None:
    untrusted = get_untrusted_types(file=parsed_args.model)
    if untrusted:
        logger.warning(f"Untrusted types in {parsed_args.model}: {untrusted}")
        print("untrusted types: " + ", ".join(untrusted))

    model = load_model(parsed_args.model)
    print(f"instance: {model.instance}")
    print(f"formula: {model.formula if model.formula is not None else '-'}")
    print(f"trained with ppmon {model.version}")
    print(
        f"prefixes: {model.n_prefixes} ({model.n_noise} noise), "
        f"clusters: {model.n_clusters}"
    )
    print(cluster_table(model))

    if not parsed_args.trees:
        return
    for cluster_id, classifier in sorted(model.classifiers.items()):
        print(f"\ncluster {cluster_id}")
        render_tree(
            classifier,
            min_support=parsed_args.min_support,
            min_probability=parsed_args.min_prob,
            use_colors=not parsed_args.no_colors,
        )


def format_parser(
    parser: Optional[argparse.ArgumentParser] = None,
) -> argparse.ArgumentParser:
    """Adds arguments and help to parent CLI parser for the inspect method."""

    if not parser:  # used in tests
        parser = argparse.ArgumentParser()

    parser_subgroup = parser.add_argument_group("inspect")
    parser_subgroup.add_argument("--model", help="Path of a trained model file.")
    parser_subgroup.add_argument(
        "--trees",
        action="store_true",
        help="Also print the tree of every cluster; forests print all their "
        "trees. Leaves failing the reliability gate are tagged.",
    )
    parser_subgroup.add_argument(
        "--no-colors",
        action="store_true",
        help="Print trees without colors even if rich is installed.",
    )
    add_runtime_arguments(parser_subgroup)
    add_config_argument(parser_subgroup)
    add_verbose_argument(parser_subgroup)
    return parser


def main(parsed_args: argparse.Namespace) -> None:
    configure_logging(parsed_args.loglevel)
    _inspect_model(parsed_args)
