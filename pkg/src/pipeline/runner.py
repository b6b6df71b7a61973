"""
Pipeline orchestration: impute -> clr -> select k -> final k-means -> ratios -> associations.

Stages run sequentially. A failure inside a stage is re-raised as StageError
carrying the stage name and the exit code of the underlying error.
"""
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.association import (
    BoxplotSummary,
    ChiSquare,
    ClusterProfile,
    ContingencyTable,
    MosaicGeometry,
    TransitionTable,
    cluster_profiles,
    cluster_transitions,
    crosstab,
    mosaic_geometry,
    numeric_summary,
)
from src.clustering import (
    CHResult,
    ClrMatrix,
    ClusterModel,
    KSelectionReport,
    SilhouetteResult,
    calinski_harabasz,
    kmeans_fit,
    select_k,
    silhouette,
)
from src.config.run_config import RunConfig
from src.errors import CodaError, EmptyInputError, InvalidClusterCountError, NumericalError, StageError
from src.imputation import (
    DetectionLimits,
    EMReport,
    ZeroPattern,
    detection_limits,
    em_impute,
    multiplicative_replace,
    zero_pattern,
)
from src.pipeline.ingest import Dataset
from src.ratios import GroupRatios, RatioSet, firm_ratio_table, grouped_center_ratios

logger = logging.getLogger(__name__)

STAGES = ("impute", "cluster", "ratios", "associate")


@dataclass(frozen=True, eq=False)
class ImputationOutcome:
    raw: np.ndarray
    parts: np.ndarray
    zeros: ZeroPattern
    limits: Optional[DetectionLimits]
    method: str
    fallback: bool = False
    fallback_reason: str = ""
    em_report: Optional[EMReport] = None

    @property
    def imputed_mask(self) -> np.ndarray:
        return self.raw == 0


@dataclass(frozen=True, eq=False)
class ClusteringOutcome:
    clr: ClrMatrix
    model: ClusterModel
    silhouette: SilhouetteResult
    calinski_harabasz: CHResult
    selection: Optional[KSelectionReport]
    forced: bool
    k_range: Optional[tuple[int, int]]
    selection_index: str


@dataclass(frozen=True, eq=False)
class AssociationOutcome:
    profiles: list[ClusterProfile]
    crosstabs: dict[str, ContingencyTable]
    mosaics: dict[str, MosaicGeometry]
    chi_squares: dict[str, Optional[ChiSquare]]
    boxplots: dict[str, list[BoxplotSummary]]
    transitions: list[TransitionTable]


@dataclass(frozen=True, eq=False)
class RunResult:
    config: RunConfig
    dataset: Dataset
    stages: tuple[str, ...]
    imputation: ImputationOutcome
    clustering: Optional[ClusteringOutcome] = None
    group_ratios: dict[str, list[GroupRatios]] = field(default_factory=dict)
    firm_ratios: list[RatioSet] = field(default_factory=list)
    association: Optional[AssociationOutcome] = None

    @property
    def assignments(self) -> Optional[np.ndarray]:
        return self.clustering.model.assignments if self.clustering else None


@contextmanager
def stage(name: str):
    logger.info(f"Stage '{name}' started")
    try:
        yield
    except StageError:
        raise
    except CodaError as e:
        raise StageError(name, e) from e
    except (ValueError, ArithmeticError) as e:
        raise StageError(name, NumericalError(str(e))) from e
    logger.info(f"Stage '{name}' finished")


def impute_parts(raw: np.ndarray, config: RunConfig) -> ImputationOutcome:
    """Zero detection, then censored EM or multiplicative replacement."""
    zeros = zero_pattern(raw)
    if not zeros.has_zeros:
        return ImputationOutcome(raw, raw.copy(), zeros, None, "none")
    limits = detection_limits(raw, config.dl_percentile)
    if config.imputation == "multiplicative":
        parts = multiplicative_replace(raw, limits, config.delta_fraction)
        return ImputationOutcome(raw, parts, zeros, limits, "multiplicative")

    try:
        result = em_impute(raw, limits, tol=config.em_tol, max_iter=config.em_max_iter)
    except NumericalError as e:
        reason = f"EM failed: {e}"
        report = None
    else:
        if result.report.converged:
            return ImputationOutcome(raw, result.rows, zeros, limits, "em", em_report=result.report)
        reason = f"EM did not converge in {result.report.iterations} iterations"
        report = result.report
    logger.warning(f"{reason}; falling back to multiplicative replacement")
    parts = multiplicative_replace(raw, limits, config.delta_fraction)
    return ImputationOutcome(raw, parts, zeros, limits, "multiplicative", fallback=True,
                             fallback_reason=reason, em_report=report)


def cluster_parts(parts: np.ndarray, row_ids, config: RunConfig) -> ClusteringOutcome:
    """CLR transform, choice of k (or the forced k) and the final model."""
    clr = ClrMatrix.from_parts(parts, row_ids=row_ids)
    seed = config.require_seed()
    n = clr.n
    if n < 2:
        raise InvalidClusterCountError(f"Clustering needs at least 2 rows, got {n}")

    selection = None
    k_range = None
    if config.k is not None:
        if config.k > n:
            raise InvalidClusterCountError(f"Forced k={config.k} exceeds the {n} rows")
        model = kmeans_fit(clr, config.k, config.restarts, seed,
                           max_iter=config.max_lloyd_iter, workers=config.workers)
        logger.info(f"Using forced k={config.k}; selection skipped")
    else:
        k_max = min(config.k_max, n - 1)
        if k_max < config.k_max:
            logger.warning(f"k_max lowered from {config.k_max} to {k_max} for {n} rows")
        if k_max < config.k_min:
            raise InvalidClusterCountError(f"k range [{config.k_min}, {config.k_max}] is empty for {n} rows")
        k_range = (config.k_min, k_max)
        selection = select_k(clr, config.k_min, k_max, config.restarts, seed,
                             max_iter=config.max_lloyd_iter, workers=config.workers)
        k = selection.best(config.k_selection_index)
        model = selection.models[k]
        logger.info(f"Selected k={k} by {config.k_selection_index} (recommendations {selection.recommended})")

    sil = silhouette(clr, model.assignments)
    ch = calinski_harabasz(clr, model.assignments)
    logger.info(f"Final model: k={model.k}, sizes {model.sizes.tolist()}, silhouette {sil.average:.4f}")
    return ClusteringOutcome(clr, model, sil, ch, selection, config.k is not None, k_range,
                             config.k_selection_index)


def associate(records, parts, model: ClusterModel, config: RunConfig) -> AssociationOutcome:
    assignments = model.assignments
    profiles = cluster_profiles(model, records, parts)
    crosstabs, mosaics, chi_squares = {}, {}, {}
    for covariate in config.covariates:
        table = crosstab(assignments, [r.covariate(covariate) for r in records])
        crosstabs[covariate] = table
        mosaics[covariate] = mosaic_geometry(table)
        chi_squares[covariate] = table.chi_square()
    boxplots = {
        name: numeric_summary([getattr(r, name) for r in records], assignments)
        for name in config.numeric_covariates
    }
    transitions = cluster_transitions(records, assignments)
    return AssociationOutcome(profiles, crosstabs, mosaics, chi_squares, boxplots, transitions)


def run_pipeline(dataset: Dataset, config: RunConfig, stages=STAGES) -> RunResult:
    """
    Run the requested stages over a filtered dataset.

    `impute` always runs. `associate` needs `cluster`. Grouping by cluster is
    dropped from the ratio tables when clustering did not run.
    """
    stages = tuple(s for s in STAGES if s in set(stages) | {"impute"})
    if "associate" in stages and "cluster" not in stages:
        stages = tuple(s for s in STAGES if s in set(stages) | {"cluster"})
    records = list(dataset.records)
    if not records:
        raise StageError("impute", EmptyInputError("No records left after filtering"))

    logger.info(f"Running stages {stages} on {len(records)} records (config digest {config.digest()[:12]})")
    raw = np.array([r.parts for r in records], dtype=float)

    with stage("impute"):
        imputation = impute_parts(raw, config)

    clustering = None
    if "cluster" in stages:
        with stage("cluster"):
            clustering = cluster_parts(imputation.parts, [r.key for r in records], config)
    assignments = clustering.model.assignments if clustering else None

    group_ratios = {}
    firm_ratios = []
    if "ratios" in stages:
        with stage("ratios"):
            for key in config.group_keys:
                if key == "cluster" and assignments is None:
                    logger.info("No clustering in this run; skipping ratios by cluster")
                    continue
                group_ratios[key] = grouped_center_ratios(records, key, assignments=assignments,
                                                          parts=imputation.parts)
            firm_ratios = firm_ratio_table(records, imputation.parts)

    association = None
    if "associate" in stages and (config.covariates or config.numeric_covariates):
        with stage("associate"):
            association = associate(records, imputation.parts, clustering.model, config)
    elif "associate" in stages:
        logger.info("No covariates requested; association outputs skipped")

    return RunResult(
        config=config,
        dataset=dataset,
        stages=stages,
        imputation=imputation,
        clustering=clustering,
        group_ratios=group_ratios,
        firm_ratios=firm_ratios,
        association=association,
    )
