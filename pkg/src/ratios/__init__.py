"""
Financial ratios for single statements and for compositional centers.
"""
from src.ratios.statement import (
    PART_NAMES,
    RATIO_LABELS,
    FinancialStatement,
    RatioSet,
    center_ratios,
    check_dupont,
    firm_ratios,
)
from src.ratios.grouped import GROUP_KEYS, GroupRatios, firm_ratio_table, grouped_center_ratios

__all__ = [
    "GROUP_KEYS",
    "PART_NAMES",
    "RATIO_LABELS",
    "FinancialStatement",
    "GroupRatios",
    "RatioSet",
    "center_ratios",
    "check_dupont",
    "firm_ratio_table",
    "firm_ratios",
    "grouped_center_ratios",
]
