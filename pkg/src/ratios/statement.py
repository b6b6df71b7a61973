"""
The twelve financial ratios computed from six non-overlapping accounting parts:

    x1 non-current assets      x4 current liabilities
    x2 current assets          x5 revenue
    x3 non-current liabilities x6 expenses

Equity is x1 + x2 - x3 - x4. When it is not positive, leverage and ROE are
undefined (None) rather than infinite or sign-flipped.

Ratios of a compositional center equal the geometric means of the firm-level
ratios for every pure part ratio, so the same formulas serve firms and centers.
"""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional

from src.coda import CompositionalCenter
from src.errors import DimensionMismatchError, InvalidCompositionError

logger = logging.getLogger(__name__)

PART_NAMES = (
    "non_current_assets",
    "current_assets",
    "non_current_liabilities",
    "current_liabilities",
    "revenue",
    "expenses",
)

# Field name -> report label
RATIO_LABELS = {
    "turnover": "Turnover ratio",
    "current_asset_turnover": "Current-asset turnover ratio",
    "profit_margin": "Profit margin ratio",
    "leverage": "Leverage ratio",
    "roa": "ROA",
    "roe": "ROE",
    "debt": "Debt ratio",
    "short_term_debt": "Short-term debt ratio",
    "long_term_solvency": "Long-term solvency ratio",
    "short_term_solvency": "Short-term solvency ratio",
    "asset_tangibility": "Asset tangibility ratio",
    "debt_maturity": "Debt maturity ratio",
}


@dataclass(frozen=True)
class FinancialStatement:
    """Six strictly positive accounting parts in monetary units."""

    x1: float
    x2: float
    x3: float
    x4: float
    x5: float
    x6: float

    def __post_init__(self):
        for name, value in zip(("x1", "x2", "x3", "x4", "x5", "x6"), self.parts):
            if not (math.isfinite(value) and value > 0):
                raise InvalidCompositionError(f"Statement part {name} must be finite and > 0, got {value!r}")

    @classmethod
    def from_parts(cls, parts) -> "FinancialStatement":
        parts = tuple(float(p) for p in parts)
        if len(parts) != 6:
            raise DimensionMismatchError(f"A statement has 6 parts, got {len(parts)}")
        return cls(*parts)

    @property
    def parts(self) -> tuple[float, ...]:
        return (self.x1, self.x2, self.x3, self.x4, self.x5, self.x6)

    @property
    def total_assets(self) -> float:
        return self.x1 + self.x2

    @property
    def total_debt(self) -> float:
        return self.x3 + self.x4

    @property
    def equity(self) -> float:
        return self.x1 + self.x2 - self.x3 - self.x4

    @property
    def operating_profit(self) -> float:
        return self.x5 - self.x6


@dataclass(frozen=True)
class RatioSet:
    turnover: float
    current_asset_turnover: float
    profit_margin: float
    leverage: Optional[float]
    roa: float
    roe: Optional[float]
    debt: float
    short_term_debt: float
    long_term_solvency: float
    short_term_solvency: float
    asset_tangibility: float
    debt_maturity: float

    @property
    def leverage_defined(self) -> bool:
        return self.leverage is not None

    def as_dict(self) -> dict:
        return asdict(self)


def firm_ratios(s: FinancialStatement) -> RatioSet:
    """All twelve ratios for one statement."""
    assets = s.total_assets
    equity = s.equity
    profit = s.operating_profit
    leverage = assets / equity if equity > 0 else None
    roe = profit / equity if equity > 0 else None
    return RatioSet(
        turnover=s.x5 / assets,
        current_asset_turnover=s.x5 / s.x2,
        profit_margin=profit / s.x5,
        leverage=leverage,
        roa=profit / assets,
        roe=roe,
        debt=s.total_debt / assets,
        short_term_debt=s.x4 / assets,
        long_term_solvency=assets / s.total_debt,
        short_term_solvency=s.x2 / s.x4,
        asset_tangibility=s.x1 / s.x2,
        debt_maturity=s.x3 / s.x4,
    )


def center_ratios(c: CompositionalCenter) -> RatioSet:
    """The ratio formulas applied to the parts of a six-part center."""
    if c.D != 6:
        raise DimensionMismatchError(f"Center ratios need a 6-part center, got {c.D}")
    ratios = firm_ratios(FinancialStatement.from_parts(c.parts))
    if not ratios.leverage_defined:
        logger.warning("Center has non-positive equity; leverage and ROE are undefined")
    return ratios


def check_dupont(r: RatioSet, tol: float = 1e-10) -> list[str]:
    """
    Return the identities a RatioSet violates (empty when consistent):
    roa = margin * turnover, roe = roa * leverage, debt + 1/leverage = 1.
    """
    failures = []
    if abs(r.roa - r.profit_margin * r.turnover) > tol * max(1.0, abs(r.roa)):
        failures.append("roa != profit_margin * turnover")
    if r.leverage is not None:
        if r.roe is None or abs(r.roe - r.roa * r.leverage) > tol * max(1.0, abs(r.roe)):
            failures.append("roe != roa * leverage")
        if abs(r.debt + 1.0 / r.leverage - 1.0) > tol:
            failures.append("debt + 1/leverage != 1")
    elif r.roe is not None:
        failures.append("roe defined while leverage undefined")
    return failures
