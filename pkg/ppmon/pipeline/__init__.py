"""Offline training of predictive models and their persistence."""

from ._config import INSTANCES, TrainingConfig
from ._model import ClusterStats, PredictiveModel
from ._train import encode_log, load_model, resolve_labeler, save_model, train

__all__ = [
    "INSTANCES",
    "ClusterStats",
    "PredictiveModel",
    "TrainingConfig",
    "encode_log",
    "load_model",
    "resolve_labeler",
    "save_model",
    "train",
]
