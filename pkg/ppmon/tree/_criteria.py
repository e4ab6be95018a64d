from __future__ import annotations

from typing import Hashable, Sequence, Tuple

import numpy as np


def entropy(counts: np.ndarray) -> np.ndarray:
    """Shannon entropy in bits of the count vectors along the last axis.

    All-zero count vectors have entropy 0.
    """
    counts = np.asarray(counts, dtype=np.float64)
    totals = counts.sum(axis=-1, keepdims=True)
    p = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    logs = np.log2(p, out=np.zeros_like(p), where=p > 0)
    return -(p * logs).sum(axis=-1)


def split_scores(counts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Information gain and gain ratio of candidate splits.

    Parameters
    ----------
    counts : numpy.ndarray of shape (..., n_partitions, n_classes)
        Class counts of every partition of every candidate split.

    Returns
    -------
    gain, ratio : numpy.ndarray of shape (...)
        The ratio is 0 where the split information is 0, i.e. where the
        split leaves all rows in a single partition.
    """
    counts = np.asarray(counts, dtype=np.float64)
    sizes = counts.sum(axis=-1)
    n = sizes.sum(axis=-1)
    weights = np.divide(
        sizes, n[..., None], out=np.zeros_like(sizes), where=n[..., None] > 0
    )
    gain = entropy(counts.sum(axis=-2)) - (weights * entropy(counts)).sum(axis=-1)
    split_info = entropy(sizes)
    ratio = np.divide(
        gain, split_info, out=np.zeros_like(gain), where=split_info > 1e-12
    )
    return gain, ratio


def gain_ratio(labels: Sequence[Hashable], partition: Sequence[Hashable]) -> float:
    """Gain ratio of splitting ``labels`` by the keys in ``partition``.

    Examples
    --------
    >>> gain_ratio(["y", "y", "n", "n"], ["a", "a", "b", "b"])
    1.0
    >>> gain_ratio(["y", "n", "y", "n"], ["a", "a", "b", "b"])
    0.0
    """
    if len(labels) != len(partition):
        raise ValueError("labels and partition must have the same length.")
    _, classes = np.unique(np.asarray(labels, dtype=object), return_inverse=True)
    _, groups = np.unique(np.asarray(partition, dtype=object), return_inverse=True)
    counts = np.zeros((groups.max(initial=-1) + 1, classes.max(initial=-1) + 1))
    np.add.at(counts, (groups.reshape(-1), classes.reshape(-1)), 1)
    _, ratio = split_scores(counts)
    return float(ratio)
