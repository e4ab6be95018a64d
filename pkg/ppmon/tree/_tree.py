from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state

from ppmon.encoding import FeatureVector
from ppmon.log import (
    MISSING,
    AttributeType,
    AttributeValue,
    DataSnapshot,
    numeric_value,
)
from ppmon.ltl import OutcomeLabel

from ._criteria import split_scores
from .exceptions import TrainingDataError

logger = logging.getLogger(__name__)

# class index 0 is compliant, index 1 non-compliant
CLASSES = (OutcomeLabel.COMPLIANT, OutcomeLabel.NON_COMPLIANT)
_MIN_GAIN = 1e-12

Snapshot = Union[DataSnapshot, FeatureVector, Mapping[str, AttributeValue]]


@dataclass(frozen=True)
class Prediction:
    """A predicted outcome with the probability and support of the evidence."""

    label: OutcomeLabel
    probability: float
    support: int


@dataclass(frozen=True)
class Leaf:
    """A terminal node.

    ``support`` is the number of training rows reaching the leaf that carry
    its label, ``total`` the number of training rows reaching it. A leaf no
    training row reached has ``total == 0`` and carries the majority label and
    fraction of its parent.
    """

    label: OutcomeLabel
    support: int
    total: int
    probability: float

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "Leaf":
        # ties go to compliant
        index = 0 if counts[0] >= counts[1] else 1
        total = int(counts[0] + counts[1])
        return cls(CLASSES[index], int(counts[index]), total, counts[index] / total)

    @classmethod
    def empty(cls, parent_counts: Sequence[int]) -> "Leaf":
        parent = cls.from_counts(parent_counts)
        return cls(parent.label, 0, 0, parent.probability)

    def prediction(self) -> Prediction:
        return Prediction(self.label, self.probability, self.support)


@dataclass(frozen=True)
class CategoricalSplit:
    """One branch per value observed at the node, plus the missing branch."""

    attribute: str
    branches: Tuple[Tuple[AttributeValue, "Node"], ...]
    missing: "Node"
    counts: Tuple[int, int]

    def route(self, value: AttributeValue) -> "Node":
        if value is MISSING:
            return self.missing
        for branch_value, child in self.branches:
            if type(branch_value) is type(value) and branch_value == value:
                return child
        # values never seen at this node take the missing branch
        return self.missing

    def children(self) -> Iterator[Tuple[str, "Node"]]:
        for value, child in self.branches:
            yield f"{self.attribute} = {value}", child
        yield f"{self.attribute} = ?", self.missing


@dataclass(frozen=True)
class ThresholdSplit:
    """A binary split of an ordered attribute, plus the missing branch."""

    attribute: str
    threshold: float
    low: "Node"
    high: "Node"
    missing: "Node"
    counts: Tuple[int, int]

    def route(self, value: AttributeValue) -> "Node":
        if value is MISSING or isinstance(value, (str, bool)):
            return self.missing
        return self.low if numeric_value(value) <= self.threshold else self.high

    def children(self) -> Iterator[Tuple[str, "Node"]]:
        yield f"{self.attribute} <= {self.threshold:g}", self.low
        yield f"{self.attribute} > {self.threshold:g}", self.high
        yield f"{self.attribute} = ?", self.missing


Node = Union[Leaf, CategoricalSplit, ThresholdSplit]


def snapshot_values(snapshot: Snapshot) -> Mapping[str, AttributeValue]:
    if isinstance(snapshot, (DataSnapshot, FeatureVector)):
        return snapshot.values
    return snapshot


@dataclass
class _Column:
    name: str
    numeric: bool
    # float with NaN for numeric columns, int codes with -1 for the others
    values: np.ndarray
    categories: List[AttributeValue]


def _is_numeric_value(value: Any) -> bool:
    return isinstance(value, (int, float, datetime)) and not isinstance(value, bool)


def _prepare(
    rows: Sequence[FeatureVector],
    schema: Optional[Mapping[str, AttributeType]] = None,
) -> Tuple[List[_Column], np.ndarray]:
    """Column-wise arrays of the training rows and their class indices."""
    if not len(rows):
        raise TrainingDataError("Cannot train a classifier on zero rows.")
    if any(row.label is None for row in rows):
        raise TrainingDataError("Every training row must carry an outcome label.")

    names: Dict[str, None] = {}
    for row in rows:
        names.update(dict.fromkeys(row.values))
    if schema is not None:
        names = {**dict.fromkeys(n for n in schema if n in names), **names}

    columns = []
    for name in names:
        raw = [row.values.get(name, MISSING) for row in rows]
        if schema is not None and name in schema:
            numeric = AttributeType(schema[name]).is_numeric
        else:
            known = [v for v in raw if v is not MISSING]
            numeric = bool(known) and all(_is_numeric_value(v) for v in known)

        if numeric:
            values = np.array(
                [
                    numeric_value(v) if _is_numeric_value(v) else np.nan
                    for v in raw
                ],
                dtype=np.float64,
            )
            columns.append(_Column(name, True, values, []))
            continue

        categories: List[AttributeValue] = []
        index: Dict[Tuple[type, Any], int] = {}
        codes = np.full(len(raw), -1, dtype=np.int64)
        for i, value in enumerate(raw):
            if value is MISSING:
                continue
            # True and 1 are different categories
            key = (type(value), value)
            if key not in index:
                index[key] = len(categories)
                categories.append(value)
            codes[i] = index[key]
        columns.append(_Column(name, False, codes, categories))

    y = np.array(
        [CLASSES.index(OutcomeLabel(row.label)) for row in rows], dtype=np.int64
    )
    return columns, y


def _class_counts(y: np.ndarray) -> Tuple[int, int]:
    counts = np.bincount(y, minlength=2)
    return int(counts[0]), int(counts[1])


def _admissible(sizes: np.ndarray, pure: np.ndarray, min_leaf: int) -> np.ndarray:
    # every non-empty partition must hold min_leaf rows or a single class
    return ((sizes == 0) | (sizes >= min_leaf) | pure).all(axis=-1)


@dataclass
class _Candidate:
    ratio: float
    column: _Column
    threshold: Optional[float] = None


class _TreeBuilder:
    """Greedy top-down induction maximizing the gain ratio."""

    def __init__(self, columns, y, min_leaf, max_features, random_state):
        self.columns = columns
        self.y = y
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.random_state = random_state

    def build(self, indices: np.ndarray, used: frozenset = frozenset()) -> Node:
        counts = _class_counts(self.y[indices])
        if 0 in counts or len(indices) < self.min_leaf:
            return Leaf.from_counts(counts)

        candidate = self._best_split(indices, used)
        if candidate is None:
            return Leaf.from_counts(counts)

        column = candidate.column
        values = column.values[indices]
        if candidate.threshold is not None:
            known = ~np.isnan(values)
            low = known & (values <= candidate.threshold)
            high = known & (values > candidate.threshold)
            return ThresholdSplit(
                attribute=column.name,
                threshold=candidate.threshold,
                low=self._child(indices[low], used, counts),
                high=self._child(indices[high], used, counts),
                missing=self._child(indices[~known], used, counts),
                counts=counts,
            )

        used = used | {column.name}
        branches = tuple(
            (
                column.categories[code],
                self._child(indices[values == code], used, counts),
            )
            for code in np.unique(values[values >= 0])
        )
        return CategoricalSplit(
            attribute=column.name,
            branches=branches,
            missing=self._child(indices[values < 0], used, counts),
            counts=counts,
        )

    def _child(self, indices, used, parent_counts) -> Node:
        if not len(indices):
            return Leaf.empty(parent_counts)
        return self.build(indices, used)

    def _candidate_batches(self, used: frozenset) -> Iterator[List[_Column]]:
        # categorical attributes are tested at most once on a path
        columns = [c for c in self.columns if c.numeric or c.name not in used]
        if self.max_features is None or len(columns) <= self.max_features:
            yield columns
            return
        # draw further attributes only while no drawn one gives a split
        order = self.random_state.permutation(len(columns))
        for start in range(0, len(columns), self.max_features):
            batch = sorted(order[start : start + self.max_features])
            yield [columns[i] for i in batch]

    def _best_split(self, indices: np.ndarray, used: frozenset) -> Optional[_Candidate]:
        y = self.y[indices]
        for batch in self._candidate_batches(used):
            best = None
            # the first attribute in column order wins ties
            for column in batch:
                values = column.values[indices]
                if column.numeric:
                    candidate = self._threshold_split(column, values, y)
                else:
                    candidate = self._categorical_split(column, values, y)
                if candidate is not None and (
                    best is None or candidate.ratio > best.ratio
                ):
                    best = candidate
            if best is not None:
                return best
        return None

    def _categorical_split(self, column, codes, y) -> Optional[_Candidate]:
        _, groups = np.unique(codes, return_inverse=True)
        groups = groups.reshape(-1)
        if groups.max() == 0:
            return None
        counts = np.zeros((groups.max() + 1, 2), dtype=np.int64)
        np.add.at(counts, (groups, y), 1)
        sizes = counts.sum(axis=1)
        if not _admissible(sizes, (counts == 0).any(axis=1), self.min_leaf):
            return None
        gain, ratio = split_scores(counts)
        if gain <= _MIN_GAIN:
            return None
        return _Candidate(float(ratio), column)

    def _threshold_split(self, column, values, y) -> Optional[_Candidate]:
        known = ~np.isnan(values)
        order = np.argsort(values[known], kind="stable")
        v = values[known][order]
        if len(v) < 2 or v[0] == v[-1]:
            return None
        onehot = np.eye(2, dtype=np.int64)[y[known][order]]
        below = np.cumsum(onehot, axis=0)[:-1]
        # a threshold sits between two consecutive distinct values
        cuts = np.flatnonzero(v[:-1] < v[1:])
        low = below[cuts]
        high = below[-1] + onehot[-1] - low
        missing = np.bincount(y[~known], minlength=2)
        counts = np.stack([low, high, np.broadcast_to(missing, low.shape)], axis=1)
        sizes = counts.sum(axis=2)
        ok = _admissible(sizes, (counts == 0).any(axis=2), self.min_leaf)
        gain, ratio = split_scores(counts)
        ok &= gain > _MIN_GAIN
        if not ok.any():
            return None
        ratio = np.where(ok, ratio, -np.inf)
        best = int(np.argmax(ratio))
        cut = cuts[best]
        return _Candidate(float(ratio[best]), column, float((v[cut] + v[cut + 1]) / 2))


def walk_leaves(node: Node) -> Iterator[Leaf]:
    if isinstance(node, Leaf):
        yield node
        return
    for _, child in node.children():
        yield from walk_leaves(child)


def _depth(node: Node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(child) for _, child in node.children())


class DecisionTree(BaseEstimator):
    """C4.5-style decision tree over data snapshots.

    Integer, real and timestamp attributes are split by threshold, boolean and
    text attributes get one branch per observed value. Every split node has a
    dedicated branch for missing values.

    Parameters
    ----------
    min_leaf : int, default=2
        Nodes with fewer training rows are not split, and a split is only
        admissible if each of its branches gets at least ``min_leaf`` rows or
        rows of a single class.

    max_features : int, default=None
        If set, only this many randomly drawn attributes are considered at
        each node.

    random_state : int, RandomState instance or None, default=None
        Drives the attribute sampling when ``max_features`` is set.

    Attributes
    ----------
    root_ : Leaf, CategoricalSplit or ThresholdSplit
        The induced tree.

    attributes_ : list of str
        Attributes seen during fit.

    n_rows_ : int
        Number of training rows.
    """

    def __init__(
        self,
        min_leaf: int = 2,
        max_features: Optional[int] = None,
        random_state=None,
    ):
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.random_state = random_state

    def fit(
        self,
        rows: Sequence[FeatureVector],
        schema: Optional[Mapping[str, AttributeType]] = None,
    ) -> "DecisionTree":
        columns, y = _prepare(rows, schema)
        return self._fit_columns(columns, y, np.arange(len(y)))

    def _fit_columns(self, columns, y, indices, random_state=None) -> "DecisionTree":
        if self.min_leaf < 1:
            raise ValueError(
                f"min_leaf must be a positive integer, got {self.min_leaf}."
            )
        builder = _TreeBuilder(
            columns,
            y,
            self.min_leaf,
            self.max_features,
            check_random_state(
                self.random_state if random_state is None else random_state
            ),
        )
        self.root_ = builder.build(np.asarray(indices))
        self.attributes_ = [column.name for column in columns]
        self.n_rows_ = len(indices)
        logger.debug(
            f"Grew a tree of depth {self.depth} with {self.n_leaves} leaves on "
            f"{self.n_rows_} rows"
        )
        return self

    def apply(self, snapshot: Snapshot) -> Leaf:
        """The leaf reached by ``snapshot``."""
        values = snapshot_values(snapshot)
        node = self.root_
        while not isinstance(node, Leaf):
            node = node.route(values.get(node.attribute, MISSING))
        return node

    def predict(self, snapshot: Snapshot) -> Prediction:
        return self.apply(snapshot).prediction()

    @property
    def depth(self) -> int:
        return _depth(self.root_)

    @property
    def n_leaves(self) -> int:
        return sum(1 for _ in walk_leaves(self.root_))

    def leaves(self) -> List[Leaf]:
        return list(walk_leaves(self.root_))


def train_tree(
    rows: Sequence[FeatureVector],
    min_leaf: int = 2,
    schema: Optional[Mapping[str, AttributeType]] = None,
) -> DecisionTree:
    """Induce a decision tree from labeled feature vectors.

    Raises :class:`~ppmon.tree.exceptions.TrainingDataError` on zero rows.
    """
    return DecisionTree(min_leaf=min_leaf).fit(rows, schema)


def predict_tree(tree: DecisionTree, snapshot: Snapshot) -> Prediction:
    """Route ``snapshot`` to its leaf and report that leaf's label, probability
    and support."""
    return tree.predict(snapshot)
