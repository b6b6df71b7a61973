"""
Industry, year and cluster mean ratios from compositional centers.

Groups are emitted in lexicographic key order on (year, nace, cluster).
Records only need `year`, `nace` and `parts` attributes.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from src.coda import CompositionalCenter, center_of_matrix
from src.errors import DataError, EmptyInputError, NumericalError, UsageError
from src.ratios.statement import FinancialStatement, RatioSet, center_ratios, check_dupont, firm_ratios

logger = logging.getLogger(__name__)

GROUP_KEYS = ("year", "nace", "cluster", "year_nace")


@dataclass(frozen=True)
class GroupRatios:
    key: tuple
    size: int
    center: CompositionalCenter
    ratios: RatioSet

    @property
    def label(self) -> str:
        return "_".join(str(k) for k in self.key)


def _key_function(group_by, assignments):
    if group_by == "year":
        return lambda i, r: (int(r.year),)
    if group_by == "nace":
        return lambda i, r: (str(r.nace),)
    if group_by == "year_nace":
        return lambda i, r: (int(r.year), str(r.nace))
    if group_by == "cluster":
        if assignments is None:
            raise UsageError("Grouping by cluster needs cluster assignments")
        return lambda i, r: (int(assignments[i]),)
    raise UsageError(f"Unknown group key {group_by!r}; expected one of {GROUP_KEYS}")


def grouped_center_ratios(rows: Sequence, group_by: str,
                          assignments: Optional[Sequence[int]] = None,
                          parts: Optional[np.ndarray] = None) -> list[GroupRatios]:
    """
    Per group: center of member statements, then center_ratios.

    Args:
        rows: Firm-year records (year, nace, parts)
        group_by: One of year, nace, cluster, year_nace
        assignments: Cluster ids aligned with rows (required for cluster)
        parts: Optional (n, 6) array overriding the records' parts, e.g.
            the imputed values
    """
    key_of = _key_function(group_by, assignments)
    if not rows:
        raise EmptyInputError("No records to group")
    if assignments is not None and len(assignments) != len(rows):
        raise DataError(f"{len(assignments)} assignments for {len(rows)} records")
    matrix = np.asarray(parts if parts is not None else [r.parts for r in rows], dtype=float)
    if matrix.shape[0] != len(rows):
        raise DataError(f"{matrix.shape[0]} part rows for {len(rows)} records")

    members: dict[tuple, list[int]] = {}
    for i, record in enumerate(rows):
        members.setdefault(key_of(i, record), []).append(i)

    results = []
    for key in sorted(members):
        idx = members[key]
        group_center = center_of_matrix(matrix[idx])
        ratios = center_ratios(group_center)
        failures = check_dupont(ratios, tol=1e-9)
        if failures:
            raise NumericalError(f"Group {key} ratios violate identities: {failures}")
        results.append(GroupRatios(key=key, size=len(idx), center=group_center, ratios=ratios))
    logger.info(f"Computed center ratios for {len(results)} groups by {group_by}")
    return results


def firm_ratio_table(rows: Sequence, parts: Optional[np.ndarray] = None) -> list[RatioSet]:
    """Firm-level RatioSet for every record, in input order."""
    matrix = np.asarray(parts if parts is not None else [r.parts for r in rows], dtype=float)
    return [firm_ratios(FinancialStatement.from_parts(row)) for row in matrix]
