"""
Ingestion, orchestration and report emission for the firm-year panel.
"""
from src.pipeline.records import HEADER, PART_COLUMNS, FirmYearRecord, LegalForm
from src.pipeline.ingest import Dataset, Exclusion, ExclusionReason, ingest
from src.pipeline.runner import STAGES, RunResult, run_pipeline
from src.pipeline.reports import emit_reports, emit_validation
from src.pipeline.synthetic import SyntheticPanel, synthetic_panel

__all__ = [
    "HEADER",
    "PART_COLUMNS",
    "STAGES",
    "Dataset",
    "Exclusion",
    "ExclusionReason",
    "FirmYearRecord",
    "LegalForm",
    "RunResult",
    "SyntheticPanel",
    "emit_reports",
    "emit_validation",
    "ingest",
    "run_pipeline",
    "synthetic_panel",
]
