"""
Per-cluster ratio profiles, numeric boxplot summaries and year-to-year cluster moves.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from src.clustering import ClusterModel
from src.coda import CompositionalCenter
from src.errors import DataError, EmptyInputError
from src.ratios import RatioSet, grouped_center_ratios

logger = logging.getLogger(__name__)

WHISKER_IQR = 1.5


@dataclass(frozen=True)
class ClusterProfile:
    cluster: int
    size: int
    share: float
    center: CompositionalCenter
    ratios: RatioSet


def cluster_profiles(model: ClusterModel, rows: Sequence,
                     parts: Optional[np.ndarray] = None) -> list[ClusterProfile]:
    """Center and center ratios of each cluster's member statements."""
    if len(rows) != model.assignments.shape[0]:
        raise DataError(f"{model.assignments.shape[0]} assignments for {len(rows)} records")
    groups = grouped_center_ratios(rows, "cluster", assignments=model.assignments, parts=parts)
    n = len(rows)
    return [
        ClusterProfile(cluster=g.key[0], size=g.size, share=g.size / n, center=g.center, ratios=g.ratios)
        for g in groups
    ]


@dataclass(frozen=True)
class BoxplotSummary:
    cluster: int
    count: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "count": self.count,
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.max,
            "whisker_low": self.whisker_low,
            "whisker_high": self.whisker_high,
            "outliers": list(self.outliers),
        }


def _summarize(cluster, values) -> BoxplotSummary:
    q1, median, q3 = np.percentile(values, [25, 50, 75], method="linear")
    iqr = q3 - q1
    low_fence = q1 - WHISKER_IQR * iqr
    high_fence = q3 + WHISKER_IQR * iqr
    inside = values[(values >= low_fence) & (values <= high_fence)]
    outliers = np.sort(values[(values < low_fence) | (values > high_fence)])
    return BoxplotSummary(
        cluster=int(cluster),
        count=int(values.shape[0]),
        min=float(values.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        max=float(values.max()),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outliers=tuple(float(v) for v in outliers),
    )


def numeric_summary(values: Sequence[float], assignments: Sequence[int]) -> list[BoxplotSummary]:
    """
    Five-number summary per cluster with linear-interpolation quartiles.

    Whiskers end at the most extreme observations within 1.5 IQR of the box.
    """
    vals = np.asarray(values, dtype=float)
    labels = np.asarray(assignments)
    if vals.shape != labels.shape:
        raise DataError(f"{vals.shape[0]} values for {labels.shape[0]} assignments")
    if vals.size == 0:
        raise EmptyInputError("No values to summarize")
    if not np.all(np.isfinite(vals)):
        raise DataError("Numeric covariate has non-finite values")
    return [_summarize(c, vals[labels == c]) for c in np.unique(labels)]


@dataclass(frozen=True, eq=False)
class TransitionTable:
    from_year: int
    to_year: int
    clusters: tuple[int, ...]
    counts: np.ndarray

    @property
    def firms(self) -> int:
        return int(self.counts.sum())

    @property
    def stay_share(self) -> float:
        return float(np.trace(self.counts) / self.firms) if self.firms else 0.0

    def to_records(self) -> list[dict]:
        records = []
        for i, source in enumerate(self.clusters):
            for j, target in enumerate(self.clusters):
                records.append({
                    "from_year": self.from_year,
                    "to_year": self.to_year,
                    "from_cluster": source,
                    "to_cluster": target,
                    "firms": int(self.counts[i, j]),
                })
        return records


def cluster_transitions(rows: Sequence, assignments: Sequence[int]) -> list[TransitionTable]:
    """
    Cluster moves of firms observed in consecutive years, one table per (t, t+1).

    Rows need `firm_id` and `year` attributes.
    """
    if len(rows) != len(assignments):
        raise DataError(f"{len(assignments)} assignments for {len(rows)} records")
    frame = pd.DataFrame({
        "firm_id": [r.firm_id for r in rows],
        "year": [int(r.year) for r in rows],
        "cluster": np.asarray(assignments, dtype=int),
    })
    clusters = tuple(int(c) for c in sorted(frame["cluster"].unique()))
    following = frame.assign(year=frame["year"] - 1)
    pairs = frame.merge(following, on=["firm_id", "year"], suffixes=("_from", "_to"))

    tables = []
    for year in sorted(pairs["year"].unique()):
        block = pairs[pairs["year"] == year]
        counts = pd.crosstab(block["cluster_from"], block["cluster_to"])
        counts = counts.reindex(index=list(clusters), columns=list(clusters), fill_value=0)
        tables.append(TransitionTable(int(year), int(year) + 1, clusters, counts.to_numpy()))
    logger.info(f"Cluster transitions over {len(tables)} consecutive year pairs")
    return tables
