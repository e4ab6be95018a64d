from __future__ import annotations

from dataclasses import dataclass, fields
from numbers import Integral, Real
from typing import Any, Dict, Optional, Union

from ppmon.encoding import PrefixSelectionConfig
from ppmon.ltl import Formula, parse_formula

from .exceptions import ConfigurationError

# instance name -> (clustering, classifier)
INSTANCES = {
    "mbased_dt": ("model_based", "decision_tree"),
    "dbscan_dt": ("dbscan", "decision_tree"),
    "mbased_rf": ("model_based", "random_forest"),
    "dbscan_rf": ("dbscan", "random_forest"),
}

# every clustering works on exactly one control flow encoding
ENCODINGS = {"model_based": "frequency", "dbscan": "sequence"}

CLUSTERING_PARAMS = {"model_based": ("k_min", "k_max"), "dbscan": ("eps", "min_points")}
CLASSIFIER_PARAMS = {
    "decision_tree": (),
    "random_forest": ("trees_count", "features_per_split"),
}


@dataclass(frozen=True)
class TrainingConfig:
    """Everything that decides how a predictive model is trained.

    Prefer :meth:`from_instance` to build one of the four supported
    combinations of clustering and classifier.

    Parameters
    ----------
    formula : Formula or str, default=None
        The monitored predicate; text is parsed. It may only be left out when
        training with a custom ``labeler``.

    clustering : {"model_based", "dbscan"}, default="model_based"
        Control flow clustering of the prefixes.

    classifier : {"decision_tree", "random_forest"}, default="decision_tree"
        Classifier trained for every cluster.

    encoding : {"frequency", "sequence"}, default=None
        Control flow encoding; it is fixed by the clustering (frequency vectors
        for model-based clustering, sequences for DBSCAN) and only checked.

    gap, max_length : int, default=5, 21
        Prefixes of length ``1, 1 + gap, ...`` up to ``max_length`` are used.

    k_min, k_max : int, default=15, 35
        Range of cluster counts tried by model-based clustering.

    eps : float, default=0.125
        DBSCAN radius in normalized edit distance.

    min_points : int, default=4
        DBSCAN core point threshold.

    min_leaf : int, default=2
        Minimum leaf size of the trees.

    trees_count : int, default=100
        Trees per random forest.

    features_per_split : int, default=None
        Attributes drawn at every split of a forest tree, ``None`` meaning the
        rounded up square root of the attribute count.

    seed : int, default=42
        Seed of the clustering initialization and of the forests.
    """

    formula: Optional[Union[Formula, str]] = None
    clustering: str = "model_based"
    classifier: str = "decision_tree"
    encoding: Optional[str] = None
    gap: int = 5
    max_length: int = 21
    k_min: int = 15
    k_max: int = 35
    eps: float = 0.125
    min_points: int = 4
    min_leaf: int = 2
    trees_count: int = 100
    features_per_split: Optional[int] = None
    seed: int = 42

    def __post_init__(self) -> None:
        if isinstance(self.formula, str):
            object.__setattr__(self, "formula", parse_formula(self.formula))
        elif self.formula is not None and not isinstance(self.formula, Formula):
            raise ConfigurationError(
                f"formula must be a Formula or its text, got {type(self.formula)}."
            )

        if self.clustering not in ENCODINGS:
            raise ConfigurationError(
                f"Unknown clustering {self.clustering!r}, use one of "
                f"{sorted(ENCODINGS)}."
            )
        if self.classifier not in CLASSIFIER_PARAMS:
            raise ConfigurationError(
                f"Unknown classifier {self.classifier!r}, use one of "
                f"{sorted(CLASSIFIER_PARAMS)}."
            )
        paired = ENCODINGS[self.clustering]
        if self.encoding is None:
            object.__setattr__(self, "encoding", paired)
        elif self.encoding != paired:
            raise ConfigurationError(
                f"{self.clustering} clustering works on the {paired} encoding, "
                f"not on the {self.encoding} encoding."
            )

        for name in ("gap", "max_length", "k_min", "k_max", "min_points", "min_leaf"):
            _check_positive_int(name, getattr(self, name))
        _check_positive_int("trees_count", self.trees_count)
        if self.features_per_split is not None:
            _check_positive_int("features_per_split", self.features_per_split)
        if self.k_min > self.k_max:
            raise ConfigurationError(
                f"k_min must not exceed k_max, got {self.k_min} > {self.k_max}."
            )
        if not isinstance(self.eps, Real) or not self.eps > 0:
            raise ConfigurationError(f"eps must be positive, got {self.eps!r}.")
        if isinstance(self.seed, bool) or not isinstance(self.seed, Integral):
            raise ConfigurationError(f"seed must be an integer, got {self.seed!r}.")

    @classmethod
    def from_instance(cls, instance: str, **overrides: Any) -> "TrainingConfig":
        """Configuration of a named instance.

        Overrides set to ``None`` keep their default. Naming a parameter of a
        technique the instance does not use, e.g. ``eps`` for ``mbased_dt``,
        is an error.

        Examples
        --------
        >>> config = TrainingConfig.from_instance("dbscan_rf", eps=0.2)
        >>> config.clustering, config.classifier, config.encoding, config.eps
        ('dbscan', 'random_forest', 'sequence', 0.2)
        """
        if instance not in INSTANCES:
            raise ConfigurationError(
                f"Unknown instance {instance!r}, use one of {sorted(INSTANCES)}."
            )
        clustering, classifier = INSTANCES[instance]
        overrides = {k: v for k, v in overrides.items() if v is not None}

        known = {f.name for f in fields(cls)} - {"clustering", "classifier"}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigurationError(f"Unknown training parameters: {unknown}.")

        misplaced = sorted(set(overrides) & _foreign_params(instance))
        if misplaced:
            raise ConfigurationError(
                f"{', '.join(misplaced)} do not apply to instance {instance}."
            )
        return cls(clustering=clustering, classifier=classifier, **overrides)

    @property
    def instance(self) -> str:
        clustering = "mbased" if self.clustering == "model_based" else "dbscan"
        classifier = "dt" if self.classifier == "decision_tree" else "rf"
        return f"{clustering}_{classifier}"

    @property
    def prefix_selection(self) -> PrefixSelectionConfig:
        return PrefixSelectionConfig(gap=self.gap, max_length=self.max_length)

    def summary(self) -> Dict[str, Any]:
        """The parameters the instance actually uses."""
        result: Dict[str, Any] = {
            "instance": self.instance,
            "formula": None if self.formula is None else str(self.formula),
            "gap": self.gap,
            "max_length": self.max_length,
        }
        for name in CLUSTERING_PARAMS[self.clustering]:
            result[name] = getattr(self, name)
        result["min_leaf"] = self.min_leaf
        for name in CLASSIFIER_PARAMS[self.classifier]:
            result[name] = getattr(self, name)
        result["seed"] = self.seed
        return result


def _check_positive_int(name: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value!r}.")


def _foreign_params(instance: str) -> set:
    # parameters of the techniques the instance does not use
    used = INSTANCES[instance]
    return {
        name
        for technique, names in {**CLUSTERING_PARAMS, **CLASSIFIER_PARAMS}.items()
        if technique not in used
        for name in names
    }


def applicable_params(instance: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """Drop the parameters of the techniques ``instance`` does not use.

    Examples
    --------
    >>> applicable_params("mbased_dt", {"eps": 0.2, "k_min": 3, "gap": 2})
    {'k_min': 3, 'gap': 2}
    """
    if instance not in INSTANCES:
        raise ConfigurationError(
            f"Unknown instance {instance!r}, use one of {sorted(INSTANCES)}."
        )
    foreign = _foreign_params(instance)
    return {name: value for name, value in params.items() if name not in foreign}
