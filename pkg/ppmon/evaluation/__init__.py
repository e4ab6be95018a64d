"""Replay harness, quality metrics, parameter sweeps and the on-the-fly
baseline."""

from ._baseline import (
    OnTheFlyPredictor,
    on_the_fly_predict,
    replay_baseline,
    similar_prefixes,
)
from ._metrics import MetricsReport, compute_metrics
from ._replay import ReplayResult, gold_standard, replay, replay_trace
from ._sweep import (
    BASELINE_INSTANCE,
    REPORT_COLUMNS,
    report_row,
    sweep,
    sweep_grid,
    write_report,
)

__all__ = [
    "BASELINE_INSTANCE",
    "MetricsReport",
    "OnTheFlyPredictor",
    "REPORT_COLUMNS",
    "ReplayResult",
    "compute_metrics",
    "gold_standard",
    "on_the_fly_predict",
    "replay",
    "replay_baseline",
    "replay_trace",
    "report_row",
    "similar_prefixes",
    "sweep",
    "sweep_grid",
    "write_report",
]
