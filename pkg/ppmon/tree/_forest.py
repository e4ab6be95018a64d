from __future__ import annotations

import logging
import math
from numbers import Integral
from typing import List, Mapping, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state

from ppmon.encoding import FeatureVector
from ppmon.log import AttributeType

from ._tree import CLASSES, DecisionTree, Prediction, Snapshot, _prepare

logger = logging.getLogger(__name__)


def _grow(columns, y, index, seed, min_leaf, max_features, bootstrap) -> DecisionTree:
    # each tree draws from its own stream, keyed by the forest seed and its index
    rng = np.random.RandomState([seed, index])
    n = len(y)
    indices = rng.randint(n, size=n) if bootstrap else np.arange(n)
    tree = DecisionTree(min_leaf=min_leaf, max_features=max_features)
    return tree._fit_columns(columns, y, indices, random_state=rng)


class RandomForest(BaseEstimator):
    """Bagged decision trees with random attribute sampling at every split.

    Parameters
    ----------
    trees_count : int, default=100
        Number of trees.

    features_per_split : int, default=None
        Attributes sampled at each split. ``None`` means the rounded up
        square root of the number of attributes.

    min_leaf : int, default=2
        Passed to every :class:`DecisionTree`.

    bootstrap : bool, default=True
        Whether each tree is trained on a bootstrap resample of the rows.
        Without it every tree sees all rows in their original order.

    random_state : int or None, default=42
        Seed of the bootstrap resamples and the attribute sampling.

    n_jobs : int, default=None
        Number of trees grown in parallel. ``None`` means 1 unless in a
        :func:`joblib.parallel_backend` context.

    Attributes
    ----------
    trees_ : list of DecisionTree
        The fitted trees.

    attributes_ : list of str
        Attributes seen during fit.
    """

    def __init__(
        self,
        trees_count: int = 100,
        features_per_split: Optional[int] = None,
        min_leaf: int = 2,
        bootstrap: bool = True,
        random_state: Optional[int] = 42,
        n_jobs: Optional[int] = None,
    ):
        self.trees_count = trees_count
        self.features_per_split = features_per_split
        self.min_leaf = min_leaf
        self.bootstrap = bootstrap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(
        self,
        rows: Sequence[FeatureVector],
        schema: Optional[Mapping[str, AttributeType]] = None,
    ) -> "RandomForest":
        if not isinstance(self.trees_count, Integral) or self.trees_count < 1:
            raise ValueError(
                f"trees_count must be a positive integer, got {self.trees_count!r}."
            )
        if self.features_per_split is not None and self.features_per_split < 1:
            raise ValueError(
                "features_per_split must be a positive integer, got "
                f"{self.features_per_split!r}."
            )

        columns, y = _prepare(rows, schema)
        max_features = self.features_per_split or max(
            1, math.ceil(math.sqrt(len(columns)))
        )
        if isinstance(self.random_state, Integral):
            seed = int(self.random_state)
        else:
            random_state = check_random_state(self.random_state)
            seed = int(random_state.randint(np.iinfo(np.int32).max))

        parallel = Parallel(n_jobs=self.n_jobs, prefer="threads")
        self.trees_: List[DecisionTree] = parallel(
            delayed(_grow)(
                columns, y, i, seed, self.min_leaf, max_features, self.bootstrap
            )
            for i in range(self.trees_count)
        )
        self.attributes_ = [column.name for column in columns]
        logger.debug(
            f"Grew {self.trees_count} trees on {len(y)} rows sampling "
            f"{max_features} of {len(columns)} attributes per split"
        )
        return self

    def predict(self, snapshot: Snapshot) -> Prediction:
        leaves = [tree.apply(snapshot) for tree in self.trees_]
        votes = np.array([CLASSES.index(leaf.label) for leaf in leaves])
        n_votes = np.bincount(votes, minlength=2)
        # ties go to compliant
        winner = 0 if n_votes[0] >= n_votes[1] else 1
        supports = [leaf.support for leaf in leaves if leaf.label is CLASSES[winner]]
        support = math.floor(sum(supports) / len(supports) + 0.5)
        probability = float(n_votes[winner] / len(leaves))
        return Prediction(CLASSES[winner], probability, int(support))


def train_forest(
    rows: Sequence[FeatureVector],
    trees_count: int = 100,
    features_per_split: Optional[int] = None,
    seed: Optional[int] = 42,
    min_leaf: int = 2,
    schema: Optional[Mapping[str, AttributeType]] = None,
    n_jobs: Optional[int] = None,
) -> RandomForest:
    """Train a random forest on labeled feature vectors.

    Every tree is grown on a bootstrap resample, considering
    ``features_per_split`` random attributes at each split. The result only
    depends on ``seed``, not on ``n_jobs``.
    """
    forest = RandomForest(
        trees_count=trees_count,
        features_per_split=features_per_split,
        min_leaf=min_leaf,
        random_state=seed,
        n_jobs=n_jobs,
    )
    return forest.fit(rows, schema)


def predict_forest(forest: RandomForest, snapshot: Snapshot) -> Prediction:
    """Majority vote of the trees.

    The probability is the fraction of trees voting for the winning label, the
    support the rounded mean leaf support of those trees.
    """
    return forest.predict(snapshot)
