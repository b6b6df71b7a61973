import itertools

import numpy as np
import pytest

from src.clustering import ClrMatrix
from src.coda import (
    CENTER_SUM_TOL,
    CLR_SUM_TOL,
    ClrVector,
    Composition,
    CompositionalCenter,
    aitchison_distance,
    center,
    center_of_matrix,
    closure,
    clr,
    clr_inverse,
)
from src.errors import DimensionMismatchError, EmptyInputError, InvalidCompositionError

from tests.conftest import SECTOR_CENTERS, random_parts


def test_closure_examples():
    assert closure(Composition((2, 2, 2))).parts == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    assert closure(Composition((1, 2, 3, 4))).parts == pytest.approx((0.1, 0.2, 0.3, 0.4))
    column = SECTOR_CENTERS[2021]
    assert closure(Composition(column)).parts == pytest.approx(column, abs=1e-12)


def test_closure_keeps_ratios(rng):
    parts = random_parts(rng, 1)[0]
    closed = closure(Composition(parts)).to_array()
    assert closed.sum() == pytest.approx(1.0)
    assert closed[0] / closed[3] == pytest.approx(parts[0] / parts[3], rel=1e-12)


@pytest.mark.parametrize("parts", [(1.0, 0.0, 2.0), (1.0, -1.0), (1.0, float("nan")), (3.0,)])
def test_invalid_compositions(parts):
    with pytest.raises(InvalidCompositionError):
        Composition(parts)


def test_clr_of_equal_parts_is_zero():
    assert clr(Composition((1,) * 6)).coords == pytest.approx((0.0,) * 6)


def test_clr_golden_2021():
    column = np.array(SECTOR_CENTERS[2021], dtype=np.longdouble)
    expected = np.log(column) - np.log(column).mean()
    coords = clr(Composition(SECTOR_CENTERS[2021])).to_array()
    assert coords == pytest.approx(expected.astype(float), abs=1e-12)
    back = clr_inverse(ClrVector(tuple(coords))).to_array()
    assert back == pytest.approx(SECTOR_CENTERS[2021], rel=1e-10)


def test_clr_properties(rng):
    for parts in random_parts(rng, 1000, D=6, scale=2.0):
        c = Composition(parts)
        coords = clr(c).to_array()
        assert abs(coords.sum()) <= 1e-10 * 6
        for lam in (1e-6, 1.0, 1e6):
            assert np.allclose(clr(c.scaled(lam)).to_array(), coords, rtol=0, atol=1e-12)
        perm = rng.permutation(6)
        assert np.allclose(clr(Composition(parts[perm])).to_array(), coords[perm], atol=1e-12)


def test_clr_inverse_round_trip(rng):
    for parts in random_parts(rng, 1000, D=5, scale=3.0):
        c = Composition(parts)
        back = clr_inverse(clr(c)).to_array()
        expected = closure(c).to_array()
        assert np.max(np.abs(back - expected) / expected) < 1e-10


def test_clr_inverse_of_zero_vector():
    assert clr_inverse(ClrVector((0.0,) * 4)).parts == pytest.approx((0.25,) * 4)


def test_clr_vector_must_sum_to_zero():
    with pytest.raises(InvalidCompositionError):
        ClrVector((1.0, 0.0, 0.0))


def _double_sum_distance(a, b):
    D = a.shape[0]
    total = 0.0
    for i, j in itertools.product(range(D), repeat=2):
        total += (np.log(a[i] / a[j]) - np.log(b[i] / b[j])) ** 2
    return np.sqrt(total / (2 * D))


def test_aitchison_distance_identity(rng):
    pairs = random_parts(rng, 2000, D=6, scale=1.5).reshape(1000, 2, 6)
    for a, b in pairs:
        d = aitchison_distance(Composition(a), Composition(b))
        assert d == pytest.approx(_double_sum_distance(a, b), abs=1e-9)
        assert d == pytest.approx(aitchison_distance(Composition(b), Composition(a)), abs=1e-15)


def test_aitchison_distance_scale_and_permutation(rng):
    a, b = random_parts(rng, 2)
    c = Composition(a)
    assert aitchison_distance(c, c) == 0.0
    assert aitchison_distance(c, c.scaled(3.7)) == pytest.approx(0.0, abs=1e-12)
    perm = rng.permutation(6)
    assert aitchison_distance(Composition(a[perm]), Composition(b[perm])) == pytest.approx(
        aitchison_distance(Composition(a), Composition(b)), abs=1e-12)


def test_aitchison_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        aitchison_distance(Composition((1, 2)), Composition((1, 2, 3)))


def test_center_examples():
    single = Composition((1.0, 3.0, 6.0))
    assert center([single]).parts == pytest.approx(closure(single).parts)
    assert center([Composition((1, 2)), Composition((4, 2))]).parts == pytest.approx((0.5, 0.5))


def test_center_matches_log_mean_exp(rng):
    panel = random_parts(rng, 20)
    g = np.exp(np.log(panel).mean(axis=0))
    result = center(Composition(row) for row in panel)
    assert isinstance(result, CompositionalCenter)
    assert result.to_array() == pytest.approx(g / g.sum(), rel=1e-12)
    assert sum(result.parts) == pytest.approx(1.0, abs=1e-12)


def test_center_ratio_is_geometric_mean_of_ratios(rng):
    panel = random_parts(rng, 200, scale=1.2)
    result = center_of_matrix(panel).to_array()
    for i, j in itertools.combinations(range(6), 2):
        gm = np.exp(np.log(panel[:, i] / panel[:, j]).mean())
        assert result[i] / result[j] == pytest.approx(gm, rel=1e-10)


def test_center_errors():
    with pytest.raises(EmptyInputError):
        center([])
    with pytest.raises(DimensionMismatchError):
        center([Composition((1, 2)), Composition((1, 2, 3))])


def test_clr_rows_and_centers_stay_within_package_tolerances(rng):
    panel = random_parts(rng, 50, scale=2.0)
    for parts in panel:
        coords = clr(Composition(tuple(parts))).to_array()
        assert abs(coords.sum()) <= CLR_SUM_TOL * coords.size
    assert ClrMatrix.from_parts(panel).n == 50
    assert abs(sum(center_of_matrix(panel).parts) - 1.0) <= CENTER_SUM_TOL
