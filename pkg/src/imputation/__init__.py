"""
Zero handling: detection limits, censored-EM imputation in log-ratio
coordinates, and multiplicative replacement as the fallback.
"""
from src.imputation.zeros import (
    DetectionLimits,
    ZeroPattern,
    detection_limits,
    multiplicative_replace,
    zero_pattern,
)
from src.imputation.censored_em import EMReport, ImputationResult, em_impute

__all__ = [
    "DetectionLimits",
    "EMReport",
    "ImputationResult",
    "ZeroPattern",
    "detection_limits",
    "em_impute",
    "multiplicative_replace",
    "zero_pattern",
]
