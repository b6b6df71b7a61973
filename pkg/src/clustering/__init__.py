"""
k-means on CLR coordinates with silhouette and Calinski-Harabasz selection of k.
"""
from src.clustering.matrix import ClrMatrix
from src.clustering.kmeans import MAX_LLOYD_ITER, ClusterModel, kmeans_fit
from src.clustering.validity import (
    INDICES,
    CHResult,
    KSelectionReport,
    KSelectionRow,
    SilhouetteResult,
    calinski_harabasz,
    select_k,
    silhouette,
)

__all__ = [
    "INDICES",
    "MAX_LLOYD_ITER",
    "CHResult",
    "ClrMatrix",
    "ClusterModel",
    "KSelectionReport",
    "KSelectionRow",
    "SilhouetteResult",
    "calinski_harabasz",
    "kmeans_fit",
    "select_k",
    "silhouette",
]
