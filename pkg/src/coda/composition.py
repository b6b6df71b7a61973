"""
Composition algebra on the simplex.

A composition is a vector of D strictly positive parts where only the ratios
between parts carry information. Compositions are not closed on construction;
closure is applied only where an operation needs unit-sum parts (centers).

All logarithms are natural logs.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import gmean

from src.errors import DimensionMismatchError, EmptyInputError, InvalidCompositionError

logger = logging.getLogger(__name__)

CLR_SUM_TOL = 1e-10
CENTER_SUM_TOL = 1e-12


def _as_parts(values) -> tuple[float, ...]:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidCompositionError(f"Expected a 1-D vector of parts, got shape {arr.shape}")
    return tuple(float(v) for v in arr)


def check_parts(mat) -> np.ndarray:
    """
    Validate an (n, D) or (D,) array of parts: finite, strictly positive, D >= 2.

    Returns the input as a float ndarray.
    """
    arr = np.asarray(mat, dtype=float)
    if arr.ndim not in (1, 2):
        raise InvalidCompositionError(f"Expected 1-D or 2-D parts, got {arr.ndim} dimensions")
    if arr.shape[-1] < 2:
        raise InvalidCompositionError("A composition needs at least two parts")
    if not np.all(np.isfinite(arr)):
        raise InvalidCompositionError("Composition parts must be finite")
    if np.any(arr <= 0):
        raise InvalidCompositionError("Composition parts must be strictly positive")
    return arr


@dataclass(frozen=True)
class Composition:
    """D strictly positive parts, in monetary units or unitless after closure."""

    parts: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", _as_parts(self.parts))
        check_parts(self.parts)

    @property
    def D(self) -> int:
        return len(self.parts)

    def to_array(self) -> np.ndarray:
        return np.array(self.parts, dtype=float)

    def scaled(self, factor: float) -> "Composition":
        return Composition(tuple(p * factor for p in self.parts))


@dataclass(frozen=True)
class ClrVector:
    """Centered log-ratio coordinates; they sum to zero."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = _as_parts(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 2:
            raise InvalidCompositionError("A CLR vector needs at least two coordinates")
        if not all(np.isfinite(coords)):
            raise InvalidCompositionError("CLR coordinates must be finite")
        if abs(sum(coords)) > CLR_SUM_TOL * len(coords):
            raise InvalidCompositionError(f"CLR coordinates must sum to zero, got {sum(coords):.3e}")

    @property
    def D(self) -> int:
        return len(self.coords)

    def to_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)


@dataclass(frozen=True)
class CompositionalCenter:
    """Per-part geometric means over a sample, closed to unit sum."""

    parts: tuple[float, ...]

    def __post_init__(self):
        parts = _as_parts(self.parts)
        object.__setattr__(self, "parts", parts)
        check_parts(parts)
        if abs(sum(parts) - 1.0) > CENTER_SUM_TOL:
            raise InvalidCompositionError(f"Center parts must sum to one, got {sum(parts)!r}")

    @property
    def D(self) -> int:
        return len(self.parts)

    def to_array(self) -> np.ndarray:
        return np.array(self.parts, dtype=float)


def closure_matrix(mat) -> np.ndarray:
    """Row-wise closure of an (n, D) or (D,) array of positive parts."""
    arr = check_parts(mat)
    return arr / arr.sum(axis=-1, keepdims=True)


def clr_matrix(mat) -> np.ndarray:
    """Row-wise CLR of an (n, D) or (D,) array of positive parts."""
    lmat = np.log(check_parts(mat))
    return lmat - lmat.mean(axis=-1, keepdims=True)


def closure(c: Composition) -> Composition:
    """Rescale to unit sum; part ratios are unchanged."""
    return Composition(tuple(closure_matrix(c.to_array())))


def clr(c: Composition) -> ClrVector:
    """coords_j = log(x_j / geometric_mean(x))."""
    return ClrVector(tuple(clr_matrix(c.to_array())))


def clr_inverse(v: ClrVector) -> Composition:
    """Exponentiate and close; the max shift keeps exp() in range."""
    coords = v.to_array()
    if not np.all(np.isfinite(coords)):
        raise InvalidCompositionError("CLR coordinates must be finite")
    expd = np.exp(coords - coords.max())
    return Composition(tuple(expd / expd.sum()))


def aitchison_distance(a: Composition, b: Composition) -> float:
    """Euclidean norm of clr(a) - clr(b)."""
    if a.D != b.D:
        raise DimensionMismatchError(f"Compositions have different sizes: {a.D} vs {b.D}")
    return float(np.linalg.norm(clr(a).to_array() - clr(b).to_array()))


def center(cs: Iterable[Composition]) -> CompositionalCenter:
    """Geometric mean of each part over the collection, closed to unit sum."""
    cs = list(cs)
    if not cs:
        raise EmptyInputError("Cannot compute the center of an empty collection")
    sizes = {c.D for c in cs}
    if len(sizes) != 1:
        raise DimensionMismatchError(f"Compositions have different sizes: {sorted(sizes)}")
    return center_of_matrix(np.vstack([c.to_array() for c in cs]))


def center_of_matrix(mat: Sequence[Sequence[float]]) -> CompositionalCenter:
    """center() for an (n, D) array of positive parts."""
    arr = check_parts(np.atleast_2d(np.asarray(mat, dtype=float)))
    if arr.shape[0] == 0:
        raise EmptyInputError("Cannot compute the center of an empty collection")
    g = gmean(arr, axis=0)
    return CompositionalCenter(tuple(g / g.sum()))
