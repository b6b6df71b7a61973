"""
Run settings for one pipeline invocation.

RunConfig is validated with pydantic and frozen after construction. Values are
layered: YAML defaults, then an optional key=value file, then CLI flags.
"""
import logging
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.errors import UsageError
from src.utils import sha256_text

logger = logging.getLogger(__name__)

GroupKey = Literal["year", "nace", "cluster", "year_nace"]
Covariate = Literal["nace", "year", "legal_form", "importer", "exporter"]
NumericCovariate = Literal["employees"]

# Keys whose key=value form is a comma separated list
LIST_KEYS = ("group_keys", "covariates", "numeric_covariates")


class RunConfig(BaseModel):
    """All numeric and categorical settings of a run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dl_percentile: float = Field(5.0, ge=0.0, lt=100.0)
    em_tol: float = Field(1e-6, gt=0.0, lt=1.0)
    em_max_iter: int = Field(200, ge=1)
    delta_fraction: float = Field(0.65, gt=0.0, lt=1.0)
    imputation: Literal["em", "multiplicative"] = "em"
    k_min: int = Field(2, ge=2)
    k_max: int = Field(10, ge=2)
    k: Optional[int] = Field(None, ge=2)
    k_selection_index: Literal["silhouette", "calinski_harabasz"] = "silhouette"
    restarts: int = Field(50, ge=1)
    max_lloyd_iter: int = Field(300, ge=1)
    seed: Optional[int] = Field(None, ge=0)
    employee_threshold: int = Field(10, ge=0)
    group_keys: tuple[GroupKey, ...] = ("year", "nace", "cluster")
    covariates: tuple[Covariate, ...] = ("nace", "year", "legal_form", "importer", "exporter")
    numeric_covariates: tuple[NumericCovariate, ...] = ("employees",)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_k_range(self):
        if self.k_max < self.k_min:
            raise ValueError(f"k_max ({self.k_max}) must be >= k_min ({self.k_min})")
        return self

    @classmethod
    def from_sources(cls, defaults=None, file_values=None, overrides=None):
        """
        Build a RunConfig from layered sources.

        Args:
            defaults: Mapping from the YAML `pipeline` section
            file_values: Mapping parsed from a key=value file
            overrides: Mapping of CLI values; None entries are ignored

        Raises:
            UsageError: when a value is out of range or a key is unknown
        """
        merged = dict(defaults or {})
        merged.update(file_values or {})
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        try:
            return cls(**merged)
        except ValidationError as e:
            raise UsageError(f"Invalid configuration: {e}") from e

    def require_seed(self):
        if self.seed is None:
            raise UsageError("A seed is required for clustering (--seed)")
        return self.seed

    def canonical(self):
        """Ordered plain-data view, echoed into every report header."""
        return self.model_dump(mode="json")

    def to_yaml(self):
        return yaml.safe_dump(self.canonical(), sort_keys=False)

    def digest(self):
        return sha256_text(self.to_yaml())


def load_key_value_file(path):
    """
    Parse a simple key=value config file.

    Blank lines and lines starting with '#' are skipped. List-valued keys take
    comma separated items; `none` or an empty value gives an empty list.

    Raises:
        UsageError: on unreadable files, lines without '=', or unknown keys
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise UsageError(f"Cannot read config file {path}: {e}") from e

    known = set(RunConfig.model_fields)
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise UsageError(f"{path}:{lineno}: unknown setting {key!r}")
        if key in LIST_KEYS:
            items = [] if value.lower() in ("", "none") else [v.strip() for v in value.split(",")]
            values[key] = [v for v in items if v]
        elif key in ("k", "seed") and value.lower() in ("", "none"):
            values[key] = None
        else:
            values[key] = value
    logger.info(f"Loaded {len(values)} settings from {path}")
    return values
