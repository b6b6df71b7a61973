"""
One firm-year row of the accounting panel, validated with pydantic.
"""
import logging
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)

HEADER = (
    "firm_id", "year", "nace", "legal_form", "employees", "importer", "exporter",
    "x1", "x2", "x3", "x4", "x5", "x6",
)
PART_COLUMNS = ("x1", "x2", "x3", "x4", "x5", "x6")


class LegalForm(str, Enum):
    PUBLIC_LIMITED = "public_limited"
    PRIVATE_LIMITED = "private_limited"
    OTHER = "other"


# Accepted spellings, compared after lower-casing and dropping dots and spaces
_LEGAL_FORM_ALIASES = {
    "publiclimited": LegalForm.PUBLIC_LIMITED,
    "public_limited": LegalForm.PUBLIC_LIMITED,
    "sa": LegalForm.PUBLIC_LIMITED,
    "sociedadanonima": LegalForm.PUBLIC_LIMITED,
    "plc": LegalForm.PUBLIC_LIMITED,
    "privatelimited": LegalForm.PRIVATE_LIMITED,
    "private_limited": LegalForm.PRIVATE_LIMITED,
    "sl": LegalForm.PRIVATE_LIMITED,
    "srl": LegalForm.PRIVATE_LIMITED,
    "sociedadlimitada": LegalForm.PRIVATE_LIMITED,
    "ltd": LegalForm.PRIVATE_LIMITED,
    "other": LegalForm.OTHER,
}

_TRUE = {"true", "yes", "y", "t"}
_FALSE = {"false", "no", "n", "f", ""}


def normalize_legal_form(value) -> LegalForm:
    if isinstance(value, LegalForm):
        return value
    key = str(value).strip().lower().replace(".", "").replace(" ", "")
    form = _LEGAL_FORM_ALIASES.get(key)
    if form is None:
        logger.warning(f"Unmapped legal form {value!r}; using 'other'")
        return LegalForm.OTHER
    return form


def parse_flag(value) -> bool:
    """true/false, yes/no, or a declared trade volume (positive means true)."""
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in _TRUE:
        return True
    if text in _FALSE:
        return False
    try:
        number = float(text)
    except ValueError:
        raise ValueError(f"not a boolean or number: {value!r}")
    if number < 0:
        raise ValueError(f"negative trade volume: {value!r}")
    return number > 0


class FirmYearRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    firm_id: str = Field(min_length=1)
    year: int
    nace: str = Field(min_length=1)
    legal_form: LegalForm
    employees: int = Field(ge=0)
    importer: bool
    exporter: bool
    x1: float = Field(ge=0, allow_inf_nan=False)
    x2: float = Field(ge=0, allow_inf_nan=False)
    x3: float = Field(ge=0, allow_inf_nan=False)
    x4: float = Field(ge=0, allow_inf_nan=False)
    x5: float = Field(ge=0, allow_inf_nan=False)
    x6: float = Field(ge=0, allow_inf_nan=False)
    line: Optional[int] = None

    @field_validator("firm_id", "nace", mode="before")
    @classmethod
    def _strip(cls, value):
        return str(value).strip()

    @field_validator("legal_form", mode="before")
    @classmethod
    def _legal_form(cls, value):
        return normalize_legal_form(value)

    @field_validator("importer", "exporter", mode="before")
    @classmethod
    def _flag(cls, value):
        return parse_flag(value)

    @property
    def parts(self) -> tuple[float, ...]:
        return (self.x1, self.x2, self.x3, self.x4, self.x5, self.x6)

    @property
    def key(self) -> tuple[str, int]:
        return (self.firm_id, self.year)

    def covariate(self, name: str):
        if name == "legal_form":
            return self.legal_form.value
        return getattr(self, name)
