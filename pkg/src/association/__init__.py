"""
Association of clusters with covariates: contingency tables, mosaic geometry,
cluster ratio profiles, boxplot summaries and cluster transitions.
"""
from src.association.tables import (
    ChiSquare,
    ContingencyTable,
    MosaicGeometry,
    MosaicRect,
    crosstab,
    level_label,
    mosaic_geometry,
)
from src.association.profiles import (
    BoxplotSummary,
    ClusterProfile,
    TransitionTable,
    cluster_profiles,
    cluster_transitions,
    numeric_summary,
)

__all__ = [
    "BoxplotSummary",
    "ChiSquare",
    "ClusterProfile",
    "ContingencyTable",
    "MosaicGeometry",
    "MosaicRect",
    "TransitionTable",
    "cluster_profiles",
    "cluster_transitions",
    "crosstab",
    "level_label",
    "mosaic_geometry",
    "numeric_summary",
]
