from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Union

import pandas as pd

from ppmon.log import EventLog
from ppmon.ltl import LabelingFunction
from ppmon.monitor import RuntimeConfig
from ppmon.pipeline import PredictiveModel, TrainingConfig, train
from ppmon.pipeline._config import applicable_params

from ._baseline import replay_baseline
from ._metrics import MetricsReport, compute_metrics
from ._replay import gold_standard, replay

logger = logging.getLogger(__name__)

REPORT_COLUMNS = [
    "instance",
    "gap",
    "min_prob",
    "tp",
    "fp",
    "tn",
    "fn",
    "accuracy",
    "failure_rate",
    "earliness",
    "init_ms",
    "processing_ms",
    "avg_prediction_ms",
]

BASELINE_INSTANCE = "on_the_fly"


def report_row(
    instance: str, gap: Union[int, str], min_prob: float, metrics: MetricsReport
) -> Dict[str, Any]:
    """One row of a sweep report."""
    return {
        "instance": instance,
        "gap": gap,
        "min_prob": min_prob,
        "tp": metrics.tp,
        "fp": metrics.fp,
        "tn": metrics.tn,
        "fn": metrics.fn,
        "accuracy": metrics.accuracy,
        "failure_rate": metrics.failure_rate,
        "earliness": metrics.earliness,
        "init_ms": metrics.init_time_ms,
        "processing_ms": metrics.processing_time_ms,
        "avg_prediction_ms": metrics.avg_prediction_time_ms,
    }


def sweep_grid(
    instances: Iterable[str], gaps: Iterable[int], **params: Any
) -> List[TrainingConfig]:
    """Training configurations of every instance and gap, in that order.

    Instance specific ``params`` are only passed to the instances using them,
    e.g. ``eps`` only reaches the DBSCAN instances.
    """
    configs = []
    for instance in instances:
        own = applicable_params(instance, params)
        for gap in gaps:
            configs.append(TrainingConfig.from_instance(instance, gap=gap, **own))
    return configs


def sweep(
    training_log: EventLog,
    test_log: EventLog,
    configs: Sequence[Union[TrainingConfig, PredictiveModel]],
    min_probabilities: Sequence[float] = (0.6, 0.7, 0.8, 0.9),
    *,
    min_support: int = 6,
    evaluation_interval: int = 5,
    labeler: Optional[LabelingFunction] = None,
    baseline: bool = False,
    similarity_threshold: float = 0.8,
    mode: str = "serial",
    n_jobs: Optional[int] = None,
) -> pd.DataFrame:
    """Evaluate every model against every minimum probability.

    Parameters
    ----------
    training_log : EventLog
        Log the configurations are trained on, and the history of the
        on-the-fly baseline.

    test_log : EventLog
        Completed traces replayed as an event stream.

    configs : list of TrainingConfig or PredictiveModel
        Trained models are evaluated as they are; configurations are trained
        on ``training_log`` first.

    min_probabilities : list of float, default=(0.6, 0.7, 0.8, 0.9)
        Probability gates; the support gate and the evaluation interval are
        the same for every row.

    baseline : bool, default=False
        Add one row per probability gate for the on-the-fly baseline, with the
        formula of the first model.

    Returns
    -------
    report : pandas.DataFrame
        One row per model and probability gate, with :data:`REPORT_COLUMNS`.
    """
    golds: Dict[Optional[str], Dict[str, Any]] = {}
    rows = []
    baseline_formula = None
    for item in configs:
        if isinstance(item, PredictiveModel):
            model = item
        else:
            model = train(training_log, item, labeler=labeler, n_jobs=n_jobs)
        if model.formula is not None and baseline_formula is None:
            baseline_formula = model.formula

        key = None if labeler is not None else model.formula
        if key not in golds:
            golds[key] = gold_standard(test_log, key, labeler=labeler)

        for min_prob in min_probabilities:
            runtime = RuntimeConfig(min_support, min_prob, evaluation_interval)
            results = replay(
                test_log, model, runtime, gold=golds[key], mode=mode, n_jobs=n_jobs
            )
            metrics = compute_metrics(results, init_time_ms=model.init_time_ms)
            rows.append(report_row(model.instance, model.config.gap, min_prob, metrics))
            logger.info(
                f"{model.instance} gap={model.config.gap} min_prob={min_prob}: "
                f"accuracy={metrics.accuracy:.3f}, "
                f"failure_rate={metrics.failure_rate:.3f}"
            )

    if baseline:
        if baseline_formula is None and labeler is None:
            raise ValueError("The baseline needs a formula or a labeler.")
        for min_prob in min_probabilities:
            runtime = RuntimeConfig(min_support, min_prob, evaluation_interval)
            results = replay_baseline(
                training_log,
                test_log,
                baseline_formula,
                similarity_threshold,
                runtime,
                labeler=labeler,
            )
            metrics = compute_metrics(results)
            rows.append(report_row(BASELINE_INSTANCE, "", min_prob, metrics))

    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def write_report(report: pd.DataFrame, sink: Union[str, Path, TextIO]) -> None:
    """Write a sweep report as CSV, without the index."""
    report.to_csv(sink, index=False, float_format="%.6g")
