"""
Cluster-by-covariate contingency tables and mosaic-plot geometry.

Rows are clusters in ascending id order; columns are covariate levels sorted
lexicographically as strings. Booleans are rendered as "true"/"false".
"""
import logging
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import chi2_contingency

from src.errors import DataError, EmptyInputError

logger = logging.getLogger(__name__)

MARGINAL_TOL = 1e-12


def level_label(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class ChiSquare:
    """Pearson chi-square of independence. Informational only."""

    statistic: float
    dof: int
    p_value: float

    def to_dict(self):
        return {"statistic": self.statistic, "dof": self.dof, "p_value": self.p_value}


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    row_labels: tuple[int, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise DataError(f"Counts shape {counts.shape} does not match labels")
        if np.any(counts < 0):
            raise DataError("Contingency counts must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def cell(self, row, col) -> int:
        return int(self.counts[self.row_labels.index(row), self.col_labels.index(col)])

    def to_frame(self, margins: bool = True) -> pd.DataFrame:
        frame = pd.DataFrame(self.counts, index=list(self.row_labels), columns=list(self.col_labels))
        frame.index.name = "cluster"
        if margins:
            frame["total"] = self.row_totals
            frame.loc["total"] = list(self.col_totals) + [self.total]
        return frame

    def chi_square(self) -> Optional[ChiSquare]:
        """None when fewer than two non-empty rows or columns remain."""
        observed = self.counts[self.row_totals > 0][:, self.col_totals > 0]
        if observed.shape[0] < 2 or observed.shape[1] < 2:
            return None
        result = chi2_contingency(observed, correction=False)
        return ChiSquare(float(result.statistic), int(result.dof), float(result.pvalue))


def crosstab(assignments: Sequence[int], categories: Sequence) -> ContingencyTable:
    """Count observations per (cluster, level)."""
    if len(assignments) != len(categories):
        raise DataError(f"{len(assignments)} assignments for {len(categories)} category values")
    if len(assignments) == 0:
        raise EmptyInputError("Cannot cross-tabulate an empty sample")
    clusters = pd.Series(assignments, name="cluster")
    if clusters.isna().any():
        raise DataError("Missing cluster ids in assignments")
    levels = pd.Series([level_label(v) for v in categories], name="level")
    table = pd.crosstab(clusters.astype(int), levels)
    rows = sorted(table.index.tolist())
    cols = sorted(table.columns.tolist())
    table = table.reindex(index=rows, columns=cols, fill_value=0)
    return ContingencyTable(tuple(int(r) for r in rows), tuple(cols), table.to_numpy())


@dataclass(frozen=True)
class MosaicRect:
    cluster: int
    level: str
    x: float
    y: float
    width: float
    height: float
    count: int


@dataclass(frozen=True, eq=False)
class MosaicGeometry:
    """Column width per cluster, segment height per (cluster, level); fractions of 1."""

    clusters: tuple[int, ...]
    levels: tuple[str, ...]
    widths: np.ndarray
    heights: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if abs(self.widths.sum() - 1.0) > MARGINAL_TOL:
            raise DataError(f"Mosaic widths sum to {self.widths.sum()!r}")
        if np.any(np.abs(self.heights.sum(axis=1) - 1.0) > MARGINAL_TOL):
            raise DataError("Mosaic column heights do not sum to one")

    def rectangles(self) -> list[MosaicRect]:
        rects = []
        x = 0.0
        for i, cluster in enumerate(self.clusters):
            y = 0.0
            for j, level in enumerate(self.levels):
                h = float(self.heights[i, j])
                rects.append(MosaicRect(cluster, level, x, y, float(self.widths[i]), h, int(self.counts[i, j])))
                y += h
            x += float(self.widths[i])
        return rects

    def to_dict(self) -> dict:
        return {
            "clusters": list(self.clusters),
            "levels": list(self.levels),
            "widths": [float(w) for w in self.widths],
            "heights": [[float(h) for h in row] for row in self.heights],
            "rectangles": [asdict(rect) for rect in self.rectangles()],
        }


def mosaic_geometry(t: ContingencyTable) -> MosaicGeometry:
    """
    width_c = n_c / n and height_{c,l} = n_{c,l} / n_c.

    Clusters with no observations are left out with a warning.
    """
    if t.total == 0:
        raise DataError("Cannot draw a mosaic of an all-zero table")
    keep = t.row_totals > 0
    if not keep.all():
        dropped = [c for c, k in zip(t.row_labels, keep) if not k]
        logger.warning(f"Mosaic excludes empty cluster rows {dropped}")
    counts = t.counts[keep]
    rows = counts.sum(axis=1)
    widths = rows / rows.sum()
    heights = counts / rows[:, None]
    clusters = tuple(c for c, k in zip(t.row_labels, keep) if k)
    return MosaicGeometry(clusters, t.col_labels, widths, heights, counts)
