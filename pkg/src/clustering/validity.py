"""
Cluster validity indices and selection of the number of clusters.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.metrics import silhouette_samples

from src.clustering.kmeans import MAX_LLOYD_ITER, ClusterModel, kmeans_fit
from src.clustering.matrix import ClrMatrix
from src.errors import DataError, InvalidClusterCountError

logger = logging.getLogger(__name__)

INDICES = ("silhouette", "calinski_harabasz")


@dataclass(frozen=True, eq=False)
class SilhouetteResult:
    average: float
    widths: np.ndarray


@dataclass(frozen=True)
class CHResult:
    value: float
    degenerate: bool
    between: float
    within: float


@dataclass(frozen=True)
class KSelectionRow:
    k: int
    silhouette: float
    calinski_harabasz: float
    ch_degenerate: bool
    wcss: float


@dataclass(frozen=True, eq=False)
class KSelectionReport:
    rows: tuple[KSelectionRow, ...]
    recommended: dict
    agreement: bool
    models: dict = field(default_factory=dict, repr=False)

    def best(self, index: str = "silhouette") -> int:
        if index not in self.recommended:
            raise InvalidClusterCountError(f"Unknown selection index {index!r}; expected one of {INDICES}")
        return self.recommended[index]

    def to_records(self) -> list[dict]:
        return [
            {
                "k": row.k,
                "silhouette": row.silhouette,
                "calinski_harabasz": row.calinski_harabasz,
                "ch_degenerate": row.ch_degenerate,
                "wcss": row.wcss,
            }
            for row in self.rows
        ]


def _labels(m: ClrMatrix, assignments) -> np.ndarray:
    labels = np.asarray(assignments)
    if labels.shape != (m.n,):
        raise DataError(f"{labels.shape[0] if labels.ndim else 0} assignments for {m.n} rows")
    return labels


def silhouette(m: ClrMatrix, assignments) -> SilhouetteResult:
    """
    Per-point silhouette widths and their average.

    Points in singleton clusters have width 0.
    """
    labels = _labels(m, assignments)
    k = np.unique(labels).shape[0]
    if k < 2:
        raise InvalidClusterCountError("Silhouette needs at least two clusters")
    if k == m.n:
        widths = np.zeros(m.n)
    else:
        widths = silhouette_samples(m.values, labels, metric="euclidean")
    return SilhouetteResult(float(widths.mean()), widths)


def calinski_harabasz(m: ClrMatrix, assignments) -> CHResult:
    """
    CH = (B / (k - 1)) / (W / (n - k)).

    When W is zero (k == n, or clusters of identical points) the value is
    +inf and `degenerate` is set.
    """
    labels = _labels(m, assignments)
    X = m.values
    levels = np.unique(labels)
    k = levels.shape[0]
    n = m.n
    if k < 2 or k > n:
        raise InvalidClusterCountError(f"Calinski-Harabasz needs 2 <= k <= n, got k={k}, n={n}")
    grand = X.mean(axis=0)
    between = 0.0
    within = 0.0
    for level in levels:
        members = X[labels == level]
        centroid = members.mean(axis=0)
        between += members.shape[0] * float(((centroid - grand) ** 2).sum())
        within += float(((members - centroid) ** 2).sum())
    if within == 0.0 or k == n:
        return CHResult(float("inf"), True, between, within)
    value = (between / (k - 1)) / (within / (n - k))
    return CHResult(float(value), False, between, within)


def _argmax_smallest_k(rows, attr):
    best = rows[0]
    for row in rows[1:]:
        if getattr(row, attr) > getattr(best, attr):
            best = row
    return best.k


def select_k(m: ClrMatrix, k_min: int, k_max: int, restarts: int, seed: int,
             max_iter: int = MAX_LLOYD_ITER, workers: int = 1) -> KSelectionReport:
    """
    Fit k-means for every k in [k_min, k_max] and score each fit.

    The recommended k maximizes each index, ties going to the smaller k.
    """
    if not 2 <= k_min <= k_max <= m.n - 1:
        raise InvalidClusterCountError(f"Need 2 <= k_min <= k_max <= n-1 = {m.n - 1}, got [{k_min}, {k_max}]")
    rows = []
    models = {}
    for k in range(k_min, k_max + 1):
        model = kmeans_fit(m, k, restarts, seed, max_iter=max_iter, workers=workers)
        sil = silhouette(m, model.assignments)
        ch = calinski_harabasz(m, model.assignments)
        rows.append(KSelectionRow(k, sil.average, ch.value, ch.degenerate, model.wcss))
        models[k] = model
        logger.info(f"k={k}: silhouette {sil.average:.4f}, CH {ch.value:.4f}, wcss {model.wcss:.4f}")

    recommended = {
        "silhouette": _argmax_smallest_k(rows, "silhouette"),
        "calinski_harabasz": _argmax_smallest_k(rows, "calinski_harabasz"),
    }
    agreement = recommended["silhouette"] == recommended["calinski_harabasz"]
    if not agreement:
        logger.warning(f"Validity indices disagree: {recommended}")
    return KSelectionReport(tuple(rows), recommended, agreement, models)
