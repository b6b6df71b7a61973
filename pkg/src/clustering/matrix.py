import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.coda import CLR_SUM_TOL, clr_matrix
from src.errors import DataError, InvalidCompositionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ClrMatrix:
    """
    CLR coordinates of n observations, one row per firm-year.

    Distances between rows are Aitchison distances. Columns are used
    as they are, without standardization.
    """

    values: np.ndarray
    row_ids: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] < 2:
            raise InvalidCompositionError(f"CLR matrix must be (n, D>=2), got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidCompositionError("CLR matrix has non-finite entries")
        sums = np.abs(values.sum(axis=1))
        if np.any(sums > CLR_SUM_TOL * values.shape[1]):
            bad = int(np.argmax(sums))
            raise InvalidCompositionError(f"CLR row {bad} sums to {values[bad].sum():.3e}, not zero")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        row_ids = tuple(self.row_ids) if self.row_ids else tuple(range(values.shape[0]))
        if len(row_ids) != values.shape[0]:
            raise DataError(f"{len(row_ids)} row ids for {values.shape[0]} rows")
        object.__setattr__(self, "row_ids", row_ids)

    @classmethod
    def from_parts(cls, parts, row_ids: Optional[Sequence] = None) -> "ClrMatrix":
        return cls(clr_matrix(np.atleast_2d(parts)), tuple(row_ids) if row_ids is not None else ())

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def D(self) -> int:
        return self.values.shape[1]
