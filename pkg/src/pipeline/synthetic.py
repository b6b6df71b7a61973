"""
Seeded generator of firm-year panels with known cluster structure.

Cluster centers lie along orthonormal directions of the zero-sum CLR subspace
around a base composition, so every pair of centers is equally far apart.
`separation` is the center distance divided by the expected distance of a row
from its own center. Small x3 values can be censored to zero to mimic rounded
zeros.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.coda import ClrVector, Composition, clr, clr_inverse
from src.errors import UsageError
from src.pipeline.records import HEADER, PART_COLUMNS

logger = logging.getLogger(__name__)

# Sector-wide center used as the base composition
BASE_COMPOSITION = (0.0730, 0.1237, 0.0200, 0.0728, 0.3638, 0.3467)
NACE_CODES = ("0111", "104", "106", "107")
LEGAL_FORMS = ("public_limited", "private_limited", "other")


@dataclass(frozen=True, eq=False)
class SyntheticPanel:
    frame: pd.DataFrame
    truth: np.ndarray
    centers: np.ndarray

    def write_csv(self, path):
        self.frame.to_csv(path, index=False, lineterminator="\n")
        logger.info(f"Wrote synthetic panel with {len(self.frame)} rows to {path}")
        return path


def _zero_sum_basis(D):
    """Orthonormal basis (D-1 rows) of the subspace of vectors summing to zero."""
    centered = np.eye(D) - 1.0 / D
    q, _ = np.linalg.qr(centered)
    return q[:, : D - 1].T


def synthetic_panel(firms: int = 100, years=(2021, 2022, 2023), clusters: int = 3, seed: int = 0,
                    separation: float = 5.0, spread: float = 0.1, zero_fraction: float = 0.0,
                    switch_prob: float = 0.0) -> SyntheticPanel:
    """
    Build a panel of `firms` firms observed in every year of `years`.

    Args:
        clusters: Number of clusters, 2..5 (one direction per cluster)
        separation: Center distance over the mean within-cluster distance
        spread: Per-coordinate standard deviation of the CLR noise
        zero_fraction: Share of x3 values, the smallest ones, set to zero
        switch_prob: Chance a firm changes cluster from one year to the next

    Returns:
        SyntheticPanel whose frame follows the input CSV schema and whose
        `truth` holds the generating cluster (1-based) of each row.
    """
    D = len(PART_COLUMNS)
    if not 2 <= clusters <= D - 1:
        raise UsageError(f"clusters must lie in [2, {D - 1}], got {clusters}")
    if firms < 1 or not years:
        raise UsageError("Need at least one firm and one year")
    if not 0.0 <= zero_fraction < 1.0:
        raise UsageError(f"zero_fraction must be in [0, 1), got {zero_fraction}")

    rng = np.random.default_rng(seed)
    basis = _zero_sum_basis(D)
    within = spread * np.sqrt(D - 1)
    radius = separation * within / np.sqrt(2.0)
    base = clr(Composition(BASE_COMPOSITION)).to_array()
    centers = base + radius * basis[:clusters]

    firm_cluster = rng.integers(0, clusters, size=firms)
    rows, truth = [], []
    for f in range(firms):
        firm_noise = rng.normal(0.0, spread * 0.8, D)
        size = float(np.exp(rng.normal(np.log(2.0e6), 0.8)))
        nace = NACE_CODES[rng.integers(0, len(NACE_CODES))]
        legal_form = LEGAL_FORMS[rng.integers(0, len(LEGAL_FORMS))]
        cluster = int(firm_cluster[f])
        for year in years:
            if switch_prob > 0 and year != years[0] and rng.random() < switch_prob:
                cluster = int(rng.integers(0, clusters))
            noise = firm_noise + rng.normal(0.0, spread * 0.6, D)
            coords = centers[cluster] + noise - noise.mean()
            parts = np.array(clr_inverse(ClrVector(tuple(coords - coords.mean()))).parts) * size
            rows.append({
                "firm_id": f"F{f + 1:05d}",
                "year": int(year),
                "nace": nace,
                "legal_form": legal_form,
                "employees": int(rng.integers(10, 400)),
                "importer": "true" if rng.random() < 0.4 else "false",
                "exporter": "true" if rng.random() < 0.3 else "false",
                **{name: round(float(v), 2) for name, v in zip(PART_COLUMNS, parts)},
            })
            truth.append(cluster + 1)

    frame = pd.DataFrame(rows, columns=list(HEADER))
    if zero_fraction > 0:
        cutoff = frame["x3"].quantile(zero_fraction)
        frame.loc[frame["x3"] <= cutoff, "x3"] = 0.0
    logger.info(f"Generated {len(frame)} rows: {firms} firms, {len(years)} years, {clusters} clusters")
    return SyntheticPanel(frame, np.array(truth), centers)
