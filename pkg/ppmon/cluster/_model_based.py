from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import logsumexp
from sklearn.utils import check_random_state

from .exceptions import ClusteringParameterError

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-6
DEFAULT_SEED = 42
MAX_ITER = 100


class ModelBasedClusters:
    """Hard-assignment mixture of diagonal Gaussians.

    Attributes
    ----------
    means : numpy.ndarray of shape (k, d)
        Cluster means.

    variances : numpy.ndarray of shape (k, d)
        Per dimension variances, never below the variance floor.

    labels : numpy.ndarray of shape (n,)
        Cluster of every training vector.

    bic : float
        ``2 ln L - p ln n`` of the mixture with the empirical cluster weights;
        higher is better.

    n_iter : int
        Number of assignment steps taken.

    objective : list of float
        Total negative log-density of the training vectors under their own
        cluster, after every iteration. It never increases.
    """

    def __init__(
        self,
        means: np.ndarray,
        variances: np.ndarray,
        labels: np.ndarray,
        bic: float,
        n_iter: int = 0,
        objective: Optional[List[float]] = None,
    ) -> None:
        self.means = means
        self.variances = variances
        self.labels = labels
        self.bic = bic
        self.n_iter = n_iter
        self.objective = [] if objective is None else objective

    @property
    def k(self) -> int:
        return len(self.means)

    def members(self, cluster_id: int) -> np.ndarray:
        """Indices of the training vectors in a cluster."""
        return np.flatnonzero(self.labels == cluster_id)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, bic={self.bic:.3f})"


def _log_density(x: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    # log N(x_i | mu_j, diag(var_j)) for all i, j, with the squared
    # difference expanded so that no (n, k, d) array is built
    precision = 1.0 / variances
    squared = (
        (x**2) @ precision.T
        - 2 * x @ (means * precision).T
        + (means**2 * precision).sum(axis=1)[None, :]
    )
    return -0.5 * (np.log(2 * np.pi * variances).sum(axis=1)[None, :] + squared)


def _fit_parameters(x, weights, labels, k):
    means = np.zeros((k, x.shape[1]))
    variances = np.zeros((k, x.shape[1]))
    totals = np.zeros(k)
    for j in range(k):
        mask = labels == j
        w = weights[mask]
        totals[j] = w.sum()
        if not totals[j]:
            continue
        means[j] = np.average(x[mask], axis=0, weights=w)
        variances[j] = np.average((x[mask] - means[j]) ** 2, axis=0, weights=w)
    return means, np.maximum(variances, VARIANCE_FLOOR), totals


def _farthest_points(x: np.ndarray, k: int, random_state) -> List[int]:
    seeds = [int(random_state.randint(len(x)))]
    nearest = ((x - x[seeds[0]]) ** 2).sum(axis=1)
    while len(seeds) < k:
        seeds.append(int(np.argmax(nearest)))
        nearest = np.minimum(nearest, ((x - x[seeds[-1]]) ** 2).sum(axis=1))
    return seeds


def _bic(x, weights, means, variances, totals) -> float:
    n = weights.sum()
    k, d = means.shape
    log_mixture = np.log(totals / n)[None, :] + _log_density(x, means, variances)
    log_likelihood = float((weights * logsumexp(log_mixture, axis=1)).sum())
    n_parameters = k * 2 * d + (k - 1)
    return 2 * log_likelihood - n_parameters * math.log(n)


def cluster_model_based(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    k: int,
    seed: Optional[int] = DEFAULT_SEED,
    max_iter: int = MAX_ITER,
) -> ModelBasedClusters:
    """Cluster vectors with classification EM on diagonal Gaussians.

    Each iteration assigns every vector to the cluster of highest density,
    then re-estimates means and variances from the members. Clusters left
    empty are dropped, so the result may have fewer than ``k`` clusters.

    Parameters
    ----------
    vectors : array-like of shape (n, d)
        The frequency vectors.

    k : int
        The initial number of clusters, ``1 <= k <= n``.

    seed : int, default=42
        Seed of the farthest-point initialization.

    max_iter : int, default=100
        Upper bound on the number of iterations; the loop ends earlier when
        an iteration changes no assignment.

    Returns
    -------
    clusters : ModelBasedClusters
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or not len(x):
        raise ClusteringParameterError("Expected a non-empty 2d array of vectors.")
    if not 1 <= k <= len(x):
        raise ClusteringParameterError(
            f"Cannot make {k} clusters out of {len(x)} vectors."
        )
    if max_iter < 1:
        raise ClusteringParameterError(f"max_iter must be positive, got {max_iter}.")

    # identical vectors always end up together, fit on the distinct ones
    unique, inverse, counts = np.unique(
        x, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1)
    weights = counts.astype(np.float64)
    random_state = check_random_state(seed)

    seeds = _farthest_points(unique, k, random_state)
    means = unique[seeds]
    center = np.average(unique, axis=0, weights=weights)
    overall = np.average((unique - center) ** 2, axis=0, weights=weights)
    variances = np.tile(np.maximum(overall, VARIANCE_FLOOR), (k, 1))

    labels = None
    objective: List[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        density = _log_density(unique, means, variances)
        new_labels = np.argmax(density, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels

        # drop empty clusters and renumber the rest in order
        kept = np.unique(labels)
        labels = np.searchsorted(kept, labels)
        means, variances, totals = _fit_parameters(unique, weights, labels, len(kept))
        own = _log_density(unique, means, variances)[np.arange(len(unique)), labels]
        objective.append(float(-(weights * own).sum()))

    bic = _bic(unique, weights, means, variances, totals)
    logger.debug(
        f"Model-based clustering with k={k} gave {len(means)} clusters after "
        f"{n_iter} iterations, BIC={bic:.3f}"
    )
    return ModelBasedClusters(
        means=means,
        variances=variances,
        labels=labels[inverse],
        bic=bic,
        n_iter=n_iter,
        objective=objective,
    )


def select_k_by_bic(
    vectors: Sequence[Sequence[float]] | np.ndarray,
    k_min: int = 15,
    k_max: int = 35,
    seed: Optional[int] = DEFAULT_SEED,
) -> ModelBasedClusters:
    """Fit :func:`cluster_model_based` for every k in ``[k_min, k_max]`` and
    keep the fit with the highest BIC.

    The range is capped at the number of distinct vectors. Ties go to the
    smaller k.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or not len(x):
        raise ClusteringParameterError("Cannot cluster an empty set of vectors.")
    if not 1 <= k_min <= k_max:
        raise ClusteringParameterError(
            f"Expected 1 <= k_min <= k_max, got k_min={k_min}, k_max={k_max}."
        )

    n_distinct = len(np.unique(x, axis=0))
    if k_max > n_distinct:
        logger.info(
            f"Only {n_distinct} distinct vectors, capping k range "
            f"{k_min}..{k_max} at {n_distinct}."
        )
        k_max = n_distinct
        k_min = min(k_min, k_max)

    best = None
    for k in range(k_min, k_max + 1):
        clusters = cluster_model_based(x, k, seed=seed)
        logger.debug(f"k={k}: {clusters.k} clusters, BIC={clusters.bic:.3f}")
        if best is None or clusters.bic > best.bic:
            best = clusters
    assert best is not None
    logger.info(f"Selected {best.k} clusters, BIC={best.bic:.3f}")
    return best
