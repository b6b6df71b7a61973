"""
Report files for a pipeline run.

Machine tables are CSV at full precision, each preceded by '#' provenance
lines (config digest, seed, input SHA-256, canonical config as JSON). Human tables are plain text
rounded to `decimals`. Geometry and summary files are JSON with a
`provenance` object. Nothing written here depends on the clock.
"""
import json
import logging
import os
from typing import Optional

import numpy as np
import pandas as pd
import yaml

from src.association import TransitionTable
from src.config.run_config import RunConfig
from src.pipeline.plots import boxplot_svg, mosaic_svg
from src.pipeline.ingest import Dataset
from src.pipeline.records import PART_COLUMNS
from src.pipeline.runner import RunResult
from src.ratios import RATIO_LABELS, GroupRatios, RatioSet
from src.utils import ensure_output_dir

logger = logging.getLogger(__name__)

RATIO_FIELDS = tuple(RATIO_LABELS)
CHI_SQUARE_NOTE = "informational only; not part of the cluster analysis"


def _plain(value):
    """numpy scalars and tuples to YAML/JSON friendly Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _fmt(value, decimals):
    if value is None:
        return "NA"
    if isinstance(value, float) and np.isinf(value):
        return "inf"
    return f"{value:.{decimals}f}"


class ReportWriter:
    """Writes report files into one directory and keeps the list of names."""

    def __init__(self, out_dir, provenance: dict, decimals: int = 3, plot_config: Optional[dict] = None,
                 config: Optional[dict] = None):
        self.out_dir = ensure_output_dir(out_dir)
        self.provenance = provenance
        self.config = config
        self.decimals = decimals
        self.plot_config = plot_config
        self.files = []

    def path(self, name):
        self.files.append(name)
        return os.path.join(self.out_dir, name)

    def csv(self, name, frame: pd.DataFrame):
        with open(self.path(name), "w", encoding="utf-8", newline="") as f:
            for key, value in self.provenance.items():
                f.write(f"# {key}: {value}\n")
            if self.config is not None:
                f.write(f"# config: {json.dumps(self.config, sort_keys=True)}\n")
            frame.to_csv(f, index=False, lineterminator="\n")

    def text(self, name, body: str):
        with open(self.path(name), "w", encoding="utf-8", newline="") as f:
            f.write(body if body.endswith("\n") else body + "\n")

    def json(self, name, payload: dict):
        document = {"provenance": self.provenance, **_plain(payload)}
        self.text(name, json.dumps(document, indent=2, sort_keys=True))

    def yaml(self, name, payload: dict):
        self.text(name, yaml.safe_dump(_plain(payload), sort_keys=False, allow_unicode=True))

    @property
    def description(self):
        return "; ".join(f"{k}={v}" for k, v in self.provenance.items())


def provenance_for(config: RunConfig, dataset: Dataset) -> dict:
    return {
        "config_digest": config.digest(),
        "seed": config.seed,
        "input_sha256": dataset.input_sha256,
    }


def excluded_frame(dataset: Dataset) -> pd.DataFrame:
    return pd.DataFrame(
        [(e.line, e.firm_id, e.year, e.reason.value) for e in dataset.exclusions],
        columns=["line", "firm_id", "year", "reason"],
    )


def imputed_frame(records, raw: np.ndarray, parts: np.ndarray) -> pd.DataFrame:
    frame = pd.DataFrame(parts, columns=list(PART_COLUMNS))
    frame.insert(0, "firm_id", [r.firm_id for r in records])
    frame.insert(1, "year", [r.year for r in records])
    frame["imputed"] = [
        ";".join(PART_COLUMNS[j] for j in np.nonzero(row == 0)[0]) for row in raw
    ]
    return frame


def center_frame(groups: list[GroupRatios]) -> pd.DataFrame:
    rows = [[g.label, g.size, *g.center.parts] for g in groups]
    return pd.DataFrame(rows, columns=["group", "size", *PART_COLUMNS])


def ratio_frame(groups: list[GroupRatios]) -> pd.DataFrame:
    rows = [[g.label, g.size, *(getattr(g.ratios, f) for f in RATIO_FIELDS)] for g in groups]
    return pd.DataFrame(rows, columns=["group", "size", *RATIO_FIELDS])


def ratio_table_text(groups: list[GroupRatios], decimals: int) -> str:
    """Ratios as rows, groups as columns."""
    table = pd.DataFrame(
        {g.label: [_fmt(getattr(g.ratios, f), decimals) for f in RATIO_FIELDS] for g in groups},
        index=[RATIO_LABELS[f] for f in RATIO_FIELDS],
    )
    table.index.name = "Ratio"
    return table.to_string()


def center_table_text(groups: list[GroupRatios], decimals: int) -> str:
    table = pd.DataFrame(
        {g.label: [_fmt(p, decimals) for p in g.center.parts] for g in groups},
        index=list(PART_COLUMNS),
    )
    table.index.name = "Part"
    return table.to_string()


def firm_ratio_frame(records, ratios: list[RatioSet]) -> pd.DataFrame:
    frame = pd.DataFrame([r.as_dict() for r in ratios], columns=list(RATIO_FIELDS))
    frame.insert(0, "firm_id", [r.firm_id for r in records])
    frame.insert(1, "year", [r.year for r in records])
    return frame


def transitions_frame(tables: list[TransitionTable]) -> pd.DataFrame:
    rows = [record for table in tables for record in table.to_records()]
    return pd.DataFrame(rows, columns=["from_year", "to_year", "from_cluster", "to_cluster", "firms"])


def _frame_text(frame: pd.DataFrame, decimals: int) -> str:
    formatted = frame.copy()
    for column in formatted.columns:
        if pd.api.types.is_float_dtype(formatted[column]):
            formatted[column] = [_fmt(v, decimals) for v in formatted[column]]
    return formatted.to_string(index=False)


def emit_validation(dataset: Dataset, config: RunConfig, out_dir, decimals: int = 3) -> list[str]:
    """Exclusion table and a short run report for `validate`."""
    writer = ReportWriter(out_dir, provenance_for(config, dataset), decimals, config=config.canonical())
    writer.csv("excluded_rows.csv", excluded_frame(dataset))
    files = sorted(writer.files + ["run_report.yaml"])
    writer.yaml("run_report.yaml", {
        "provenance": writer.provenance,
        "config": config.canonical(),
        "input": {"file": os.path.basename(dataset.source), "sha256": dataset.input_sha256},
        "counts": _counts(dataset),
        "files": files,
    })
    return writer.files


def _counts(dataset: Dataset) -> dict:
    return {
        "ingested": dataset.n_ingested,
        "kept": dataset.n_kept,
        "excluded": len(dataset.exclusions),
        "excluded_by_reason": dataset.exclusion_counts(),
    }


def emit_reports(result: RunResult, out_dir, decimals: int = 3, plot_config: Optional[dict] = None) -> list[str]:
    """
    Write every report the run produced into out_dir.

    Returns:
        The file names written, run_report.yaml last.

    Raises:
        DataError: out_dir cannot be created or written
    """
    dataset = result.dataset
    records = list(dataset.records)
    writer = ReportWriter(out_dir, provenance_for(result.config, dataset), decimals, plot_config,
                          config=result.config.canonical())
    report = {
        "provenance": writer.provenance,
        "config": result.config.canonical(),
        "input": {"file": os.path.basename(dataset.source), "sha256": dataset.input_sha256},
        "stages": list(result.stages),
        "counts": _counts(dataset),
    }

    writer.csv("excluded_rows.csv", excluded_frame(dataset))

    imputation = result.imputation
    writer.csv("imputed_parts.csv", imputed_frame(records, imputation.raw, imputation.parts))
    report["imputation"] = {
        "zero_pattern": imputation.zeros.to_dict(),
        "detection_limits": imputation.limits.to_dict() if imputation.limits else None,
        "method": imputation.method,
        "fallback": imputation.fallback,
        "fallback_reason": imputation.fallback_reason or None,
        "em": imputation.em_report.to_dict() if imputation.em_report else None,
    }

    clustering = result.clustering
    if clustering is not None:
        model = clustering.model
        if clustering.selection is not None:
            kselection = pd.DataFrame(clustering.selection.to_records())
            writer.csv("kselection.csv", kselection)
            writer.text("kselection.txt", _frame_text(kselection, decimals))
        writer.csv("assignments.csv", pd.DataFrame({
            "firm_id": [r.firm_id for r in records],
            "year": [r.year for r in records],
            "cluster": model.assignments,
        }))
        centroids = model.clr_centroid_table()
        compositions = np.array([c.parts for c in model.centroid_compositions()])
        for j, name in enumerate(PART_COLUMNS):
            centroids[name] = compositions[:, j]
        writer.csv("cluster_centroids.csv", centroids)
        report["clustering"] = {
            "k": model.k,
            "forced": clustering.forced,
            "k_range": list(clustering.k_range) if clustering.k_range else None,
            "selection_index": None if clustering.forced else clustering.selection_index,
            "recommended": clustering.selection.recommended if clustering.selection else None,
            "indices_agree": clustering.selection.agreement if clustering.selection else None,
            "silhouette": clustering.silhouette.average,
            "calinski_harabasz": clustering.calinski_harabasz.value,
            "ch_degenerate": clustering.calinski_harabasz.degenerate,
            "wcss": model.wcss,
            "sizes": model.sizes,
            "shares": model.shares,
            "restarts": model.restarts,
            "best_restart": model.best_restart,
            "iterations": model.iterations,
            "converged": model.converged,
        }

    for key, groups in result.group_ratios.items():
        writer.csv(f"center_by_{key}.csv", center_frame(groups))
        writer.text(f"center_by_{key}.txt", center_table_text(groups, decimals))
        writer.csv(f"ratios_by_{key}.csv", ratio_frame(groups))
        writer.text(f"ratios_by_{key}.txt", ratio_table_text(groups, decimals))
    if result.firm_ratios:
        writer.csv("firm_ratios.csv", firm_ratio_frame(records, result.firm_ratios))

    association = result.association
    if association is not None:
        profiles = pd.DataFrame([
            [p.cluster, p.size, p.share, *(getattr(p.ratios, f) for f in RATIO_FIELDS)]
            for p in association.profiles
        ], columns=["cluster", "size", "share", *RATIO_FIELDS])
        writer.csv("cluster_profiles.csv", profiles)
        for covariate, table in association.crosstabs.items():
            frame = table.to_frame(margins=True).reset_index()
            writer.csv(f"crosstab_{covariate}.csv", frame)
            writer.text(f"crosstab_{covariate}.txt", frame.to_string(index=False))
            geometry = association.mosaics[covariate]
            mosaic_svg(geometry, writer.path(f"mosaic_{covariate}.svg"),
                       title=f"Clusters by {covariate}", description=writer.description,
                       plot_config=plot_config)
            writer.json(f"mosaic_{covariate}.geometry", geometry.to_dict())
        for name, summaries in association.boxplots.items():
            boxplot_svg(summaries, writer.path(f"boxplot_{name}.svg"),
                        title=f"{name.capitalize()} by cluster", ylabel=name,
                        description=writer.description, plot_config=plot_config)
            writer.json(f"boxplot_{name}.summary", {"summaries": [s.to_dict() for s in summaries]})
        writer.csv("transitions.csv", transitions_frame(association.transitions))
        report["association"] = {
            "covariates": list(association.crosstabs),
            "chi_square": {
                "note": CHI_SQUARE_NOTE,
                **{cov: chi.to_dict() if chi else None for cov, chi in association.chi_squares.items()},
            },
            "transitions": [
                {"from_year": t.from_year, "to_year": t.to_year, "firms": t.firms, "stay_share": t.stay_share}
                for t in association.transitions
            ],
        }

    report["files"] = sorted(writer.files + ["run_report.yaml"])
    writer.yaml("run_report.yaml", report)
    logger.info(f"Wrote {len(writer.files)} report files to {writer.out_dir}")
    return writer.files
