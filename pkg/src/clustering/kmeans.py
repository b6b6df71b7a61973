"""
k-means in CLR space with k-means++ seeding and independent restarts.

Each restart draws from its own generator, default_rng([seed, restart]), so
the best-of-restarts model does not depend on how restarts are scheduled.
The best restart is the one with the smallest WCSS; ties go to the lowest
restart index. Cluster ids are 1-based and numbered by first appearance in
row order.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.clustering.matrix import ClrMatrix
from src.coda import ClrVector, Composition, clr_inverse
from src.errors import InvalidClusterCountError, NumericalError, UsageError

logger = logging.getLogger(__name__)

MAX_LLOYD_ITER = 300


@dataclass(frozen=True, eq=False)
class ClusterModel:
    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    wcss: float
    seed: int
    restarts: int
    iterations: int
    converged: bool = True
    best_restart: int = 0

    def __post_init__(self):
        sizes = np.bincount(self.assignments, minlength=self.k + 1)[1:]
        if sizes.shape[0] != self.k or np.any(sizes == 0):
            raise NumericalError(f"Cluster model has empty clusters: sizes {sizes.tolist()}")

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k + 1)[1:]

    @property
    def shares(self) -> np.ndarray:
        return self.sizes / self.assignments.shape[0]

    def clr_centroid_table(self) -> pd.DataFrame:
        columns = [f"clr_x{j + 1}" for j in range(self.centroids.shape[1])]
        table = pd.DataFrame(self.centroids, columns=columns)
        table.insert(0, "cluster", np.arange(1, self.k + 1))
        table.insert(1, "size", self.sizes)
        return table

    def centroid_compositions(self) -> list[Composition]:
        """Centroids mapped back to closed compositions."""
        # centroid means of zero-sum rows are zero-sum up to rounding
        return [clr_inverse(ClrVector(tuple(row - row.mean()))) for row in self.centroids]


@dataclass(frozen=True, eq=False)
class _Restart:
    index: int
    labels: np.ndarray
    centroids: np.ndarray
    wcss: float
    iterations: int
    converged: bool


def _sq_distances(X, centroids):
    return ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _kmeans_plusplus(X, k, rng):
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    chosen = [int(rng.integers(0, n))]
    centroids[0] = X[chosen[0]]
    closest = ((X - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every row coincides with a seed
            idx = int(rng.choice(np.setdiff1d(np.arange(n), chosen)))
        chosen.append(idx)
        centroids[i] = X[idx]
        closest = np.minimum(closest, ((X - centroids[i]) ** 2).sum(axis=1))
    return centroids


def _update(X, labels, k):
    """Centroids as cluster means; an empty cluster takes the point farthest from its centroid."""
    labels = labels.copy()
    sizes = np.bincount(labels, minlength=k)
    centroids = np.zeros((k, X.shape[1]))
    for j in np.nonzero(sizes)[0]:
        centroids[j] = X[labels == j].mean(axis=0)
    for j in np.nonzero(sizes == 0)[0]:
        spread = ((X - centroids[labels]) ** 2).sum(axis=1)
        spread[sizes[labels] <= 1] = -1.0
        far = int(np.argmax(spread))
        logger.debug(f"Empty cluster {j} reseeded at row {far}")
        sizes[labels[far]] -= 1
        labels[far] = j
        sizes[j] = 1
        centroids[j] = X[far]
    for j in range(k):
        centroids[j] = X[labels == j].mean(axis=0)
    return centroids, labels


def _lloyd(X, k, rng, max_iter, index) -> _Restart:
    centroids = _kmeans_plusplus(X, k, rng)
    centroids, labels = _update(X, np.argmin(_sq_distances(X, centroids), axis=1), k)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_centroids, new_labels = _update(X, np.argmin(_sq_distances(X, centroids), axis=1), k)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        centroids, labels = new_centroids, new_labels
    wcss = float(((X - centroids[labels]) ** 2).sum())
    return _Restart(index, labels, centroids, wcss, iterations, converged)


def _relabel(labels, centroids):
    """Number clusters 1..k by first appearance in row order."""
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    mapping = np.empty(centroids.shape[0], dtype=int)
    mapping[order] = np.arange(1, order.shape[0] + 1)
    return mapping[labels], centroids[order]


def kmeans_fit(m: ClrMatrix, k: int, restarts: int, seed: int,
               max_iter: int = MAX_LLOYD_ITER, workers: int = 1) -> ClusterModel:
    """
    Best-of-restarts k-means on CLR rows.

    Args:
        m: CLR coordinates
        k: Number of clusters, 2 <= k <= n
        restarts: Independent k-means++ initializations
        seed: Non-negative integer seed
        max_iter: Lloyd iteration cap per restart
        workers: Threads running restarts concurrently

    Raises:
        InvalidClusterCountError: k outside [2, n]
        UsageError: restarts < 1 or a negative seed
    """
    n = m.n
    if k < 2 or k > n:
        raise InvalidClusterCountError(f"k must lie in [2, {n}], got {k}")
    if restarts < 1:
        raise UsageError(f"restarts must be >= 1, got {restarts}")
    if seed is None or seed < 0:
        raise UsageError(f"seed must be a non-negative integer, got {seed!r}")

    X = m.values

    def run(index):
        rng = np.random.default_rng([seed, index])
        return _lloyd(X, k, rng, max_iter, index)

    if workers > 1 and restarts > 1:
        with ThreadPoolExecutor(max_workers=min(workers, restarts)) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(index) for index in range(restarts)]

    best = min(results, key=lambda r: (r.wcss, r.index))
    if not best.converged:
        logger.warning(f"k={k}: best restart hit the {max_iter}-iteration cap")
    labels, centroids = _relabel(best.labels, best.centroids)
    logger.debug(f"k={k}: best restart {best.index} of {restarts}, wcss {best.wcss:.6g}")
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=labels,
        wcss=best.wcss,
        seed=seed,
        restarts=restarts,
        iterations=best.iterations,
        converged=best.converged,
        best_restart=best.index,
    )
