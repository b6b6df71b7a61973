"""
Reading and filtering the firm-year panel.

Input is comma separated UTF-8 with the exact header in `records.HEADER`.
A row is excluded, with the first matching reason, when:

    employees < threshold          below-employee-threshold
    x1 + x2 == 0                   zero-total-assets
    x5 == 0                        inactive-revenue
    x6 == 0                        zero-expenses

Other zeros (x1..x4 individually) stay in for imputation.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import pandas as pd
from pydantic import ValidationError

from src.errors import DataError, EmptyInputError
from src.pipeline.records import HEADER, FirmYearRecord
from src.utils import sha256_file

logger = logging.getLogger(__name__)


class ExclusionReason(str, Enum):
    BELOW_EMPLOYEE_THRESHOLD = "below-employee-threshold"
    ZERO_TOTAL_ASSETS = "zero-total-assets"
    INACTIVE_REVENUE = "inactive-revenue"
    ZERO_EXPENSES = "zero-expenses"


@dataclass(frozen=True)
class Exclusion:
    line: int
    firm_id: str
    year: int
    reason: ExclusionReason


@dataclass(frozen=True)
class Dataset:
    records: tuple[FirmYearRecord, ...]
    exclusions: tuple[Exclusion, ...]
    n_ingested: int
    input_sha256: str = ""
    source: str = ""

    @property
    def n_kept(self) -> int:
        return len(self.records)

    def exclusion_counts(self) -> dict[str, int]:
        counts = {reason.value: 0 for reason in ExclusionReason}
        for exclusion in self.exclusions:
            counts[exclusion.reason.value] += 1
        return counts


def exclusion_reason(record: FirmYearRecord, employee_threshold: int) -> Optional[ExclusionReason]:
    if record.employees < employee_threshold:
        return ExclusionReason.BELOW_EMPLOYEE_THRESHOLD
    if record.x1 + record.x2 == 0:
        return ExclusionReason.ZERO_TOTAL_ASSETS
    if record.x5 == 0:
        return ExclusionReason.INACTIVE_REVENUE
    if record.x6 == 0:
        return ExclusionReason.ZERO_EXPENSES
    return None


def read_records(path) -> list[FirmYearRecord]:
    """
    Parse every data row of the file into a FirmYearRecord.

    Raises:
        DataError: unreadable file, wrong header, malformed row (with its line
            number) or duplicate (firm_id, year)
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False,
                            encoding="utf-8")
    except FileNotFoundError as e:
        raise DataError(f"Input file not found: {path}") from e
    except pd.errors.EmptyDataError as e:
        raise DataError(f"Input file is empty: {path}") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DataError(f"Malformed input {path}: {e}") from e

    if tuple(frame.columns) != HEADER:
        raise DataError(f"Unexpected header in {path}: {','.join(map(str, frame.columns))}; "
                        f"expected {','.join(HEADER)}")

    records = []
    seen = {}
    for offset, row in enumerate(frame.itertuples(index=False, name=None)):
        line = offset + 2
        values = ["" if pd.isna(v) else str(v).strip() for v in row]
        if not any(values):
            continue
        if any(v == "" for i, v in enumerate(values) if HEADER[i] not in ("importer", "exporter")):
            raise DataError(f"{path}:{line}: missing value(s) in row")
        try:
            record = FirmYearRecord(**dict(zip(HEADER, values)), line=line)
        except ValidationError as e:
            problems = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
            raise DataError(f"{path}:{line}: {problems}") from e
        if record.key in seen:
            raise DataError(f"{path}:{line}: duplicate firm-year {record.key} (first at line {seen[record.key]})")
        seen[record.key] = line
        records.append(record)
    return records


def filter_records(records, employee_threshold: int = 10) -> tuple[list[FirmYearRecord], list[Exclusion]]:
    """Split records into kept rows and exclusions with one reason each."""
    kept, excluded = [], []
    for record in records:
        reason = exclusion_reason(record, employee_threshold)
        if reason is None:
            kept.append(record)
        else:
            excluded.append(Exclusion(record.line or 0, record.firm_id, record.year, reason))
            logger.debug(f"Excluded {record.key} at line {record.line}: {reason.value}")
    return kept, excluded


def ingest(path, employee_threshold: int = 10) -> Dataset:
    """Read, validate and filter the panel; exclusions are logged by reason."""
    logger.info(f"Ingesting {path}")
    records = read_records(path)
    if not records:
        raise EmptyInputError(f"No data rows in {path}")
    kept, excluded = filter_records(records, employee_threshold)
    dataset = Dataset(
        records=tuple(kept),
        exclusions=tuple(excluded),
        n_ingested=len(records),
        input_sha256=sha256_file(path),
        source=str(path),
    )
    logger.info(f"Ingested {dataset.n_ingested} rows: {dataset.n_kept} kept, "
                f"{len(excluded)} excluded {dataset.exclusion_counts()}")
    return dataset
