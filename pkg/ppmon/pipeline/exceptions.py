from __future__ import annotations


class TrainingError(RuntimeError):
    """Raise when a training log yields no model, e.g. when it has no prefixes
    or DBSCAN leaves every prefix as noise."""


class ConfigurationError(ValueError):
    """Raise when a training configuration mixes techniques or parameters that
    do not go together."""
