"""
Compositional data core: closure, centered log-ratios, Aitchison distance
and compositional centers.
"""
from src.coda.composition import (
    CENTER_SUM_TOL,
    CLR_SUM_TOL,
    ClrVector,
    Composition,
    CompositionalCenter,
    aitchison_distance,
    center,
    center_of_matrix,
    check_parts,
    closure,
    closure_matrix,
    clr,
    clr_inverse,
    clr_matrix,
)

__all__ = [
    "CENTER_SUM_TOL",
    "CLR_SUM_TOL",
    "ClrVector",
    "Composition",
    "CompositionalCenter",
    "aitchison_distance",
    "center",
    "center_of_matrix",
    "check_parts",
    "closure",
    "closure_matrix",
    "clr",
    "clr_inverse",
    "clr_matrix",
]
