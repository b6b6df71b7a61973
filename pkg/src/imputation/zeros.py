"""
Zero bookkeeping and the simple multiplicative replacement.

Detection limits use the linear-interpolation percentile between order
statistics (numpy's default "linear" method): for sorted values v_0..v_{m-1}
the p-th percentile sits at fractional rank (m - 1) * p / 100.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.errors import DataError, EmptyInputError, NegativePartError, UnimputablePartError, UsageError

logger = logging.getLogger(__name__)


def as_part_rows(rows) -> np.ndarray:
    """Validate an (n, D) array of non-negative, finite accounting parts."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise DataError(f"Expected an (n, D) array of parts, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptyInputError("No rows to inspect")
    if not np.all(np.isfinite(arr)):
        raise DataError("Accounting parts must be finite")
    if np.any(arr < 0):
        rows_bad, cols_bad = np.nonzero(arr < 0)
        raise NegativePartError(
            f"Negative accounting value at row {int(rows_bad[0])}, part x{int(cols_bad[0]) + 1}")
    return arr


@dataclass(frozen=True)
class ZeroPattern:
    counts: tuple[int, ...]
    n_rows: int

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(c / self.n_rows for c in self.counts)

    @property
    def has_zeros(self) -> bool:
        return any(self.counts)

    def to_dict(self):
        return {
            "n_rows": self.n_rows,
            "counts": {f"x{j + 1}": c for j, c in enumerate(self.counts)},
            "fractions": {f"x{j + 1}": f for j, f in enumerate(self.fractions)},
        }


@dataclass(frozen=True)
class DetectionLimits:
    """Per-part detection limit DL_j, in the units of part j."""

    values: tuple[float, ...]
    percentile: float

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def to_dict(self):
        return {
            "percentile": self.percentile,
            "values": {f"x{j + 1}": v for j, v in enumerate(self.values)},
        }


def zero_pattern(rows) -> ZeroPattern:
    """Exact count of zero entries per part."""
    arr = as_part_rows(rows)
    counts = tuple(int(c) for c in (arr == 0).sum(axis=0))
    pattern = ZeroPattern(counts=counts, n_rows=arr.shape[0])
    logger.info(f"Zero pattern over {pattern.n_rows} rows: {dict(enumerate(counts, start=1))}")
    return pattern


def detection_limits(rows, percentile: float = 5.0) -> DetectionLimits:
    """
    DL_j = the given percentile of the non-zero values of part j.

    A percentile of 0 yields the minimum non-zero value.

    Raises:
        UsageError: percentile outside [0, 100)
        UnimputablePartError: a part with zeros has no non-zero value
    """
    if not 0.0 <= percentile < 100.0:
        raise UsageError(f"Percentile must be in [0, 100), got {percentile}")
    arr = as_part_rows(rows)
    limits = []
    for j in range(arr.shape[1]):
        column = arr[:, j]
        nonzero = column[column > 0]
        if nonzero.size == 0:
            raise UnimputablePartError(f"Part x{j + 1} is zero in every row; no detection limit exists")
        limits.append(float(np.percentile(nonzero, percentile, method="linear")))
    dl = DetectionLimits(values=tuple(limits), percentile=float(percentile))
    logger.debug(f"Detection limits at percentile {percentile}: {dl.values}")
    return dl


def multiplicative_replace(rows, dl: DetectionLimits, delta_fraction: float = 0.65) -> np.ndarray:
    """
    Set every zero cell of part j to delta_fraction * DL_j.

    Non-zero cells are returned unchanged; the parts are not closed, so no
    other part is rescaled.
    """
    if not 0.0 < delta_fraction < 1.0:
        raise UsageError(f"delta_fraction must be in (0, 1), got {delta_fraction}")
    arr = as_part_rows(rows)
    limits = dl.to_array()
    if limits.shape[0] != arr.shape[1]:
        raise DataError(f"Detection limits cover {limits.shape[0]} parts, data has {arr.shape[1]}")
    zeros = arr == 0
    for j in np.nonzero(zeros.any(axis=0))[0]:
        if not limits[j] > 0:
            raise UnimputablePartError(f"Part x{j + 1} has zeros but detection limit {limits[j]}")
    out = arr.copy()
    out[zeros] = np.broadcast_to(delta_fraction * limits, arr.shape)[zeros]
    logger.info(f"Multiplicative replacement filled {int(zeros.sum())} zero cells (fraction {delta_fraction})")
    return out
