import itertools

import numpy as np
import pytest

from src.coda import CompositionalCenter, center_of_matrix
from src.errors import DimensionMismatchError, InvalidCompositionError, UsageError
from src.ratios import (
    FinancialStatement,
    center_ratios,
    check_dupont,
    firm_ratio_table,
    firm_ratios,
    grouped_center_ratios,
)

from tests.conftest import RATIO_ORDER, SECTOR_CENTERS, SECTOR_RATIOS, make_record, random_parts


def sector_center(year):
    parts = np.array(SECTOR_CENTERS[year])
    return CompositionalCenter(tuple(parts / parts.sum()))


def test_firm_ratios_2021_column():
    ratios = firm_ratios(FinancialStatement(*SECTOR_CENTERS[2021]))
    expected = SECTOR_RATIOS[2021]
    for name in RATIO_ORDER:
        assert getattr(ratios, name) == pytest.approx(expected[name], abs=0.01), name


def test_firm_ratios_equal_parts_leave_leverage_undefined():
    ratios = firm_ratios(FinancialStatement(1, 1, 1, 1, 1, 1))
    assert ratios.profit_margin == 0.0
    assert ratios.roa == 0.0
    assert ratios.turnover == 0.5
    assert ratios.current_asset_turnover == 1.0
    assert ratios.debt == 1.0
    assert ratios.leverage is None
    assert ratios.roe is None
    assert not ratios.leverage_defined


def test_firm_ratios_hand_example():
    ratios = firm_ratios(FinancialStatement(2, 2, 1, 1, 4, 3))
    assert ratios.turnover == 1.0
    assert ratios.profit_margin == 0.25
    assert ratios.leverage == 2.0
    assert ratios.roa == 0.25
    assert ratios.roe == 0.5
    assert ratios.debt == 0.5


def test_negative_equity_is_undefined_not_negative():
    ratios = firm_ratios(FinancialStatement(1, 1, 2, 2, 5, 4))
    assert ratios.leverage is None
    assert ratios.roe is None
    assert check_dupont(ratios) == []


def test_statement_rejects_non_positive_parts():
    with pytest.raises(InvalidCompositionError):
        FinancialStatement(1, 0, 1, 1, 1, 1)
    with pytest.raises(DimensionMismatchError):
        FinancialStatement.from_parts((1, 2, 3))


def test_dupont_identities_on_random_statements(rng):
    for parts in random_parts(rng, 10_000, scale=1.0):
        ratios = firm_ratios(FinancialStatement.from_parts(parts))
        assert abs(ratios.roa - ratios.profit_margin * ratios.turnover) <= 1e-10
        if ratios.leverage is not None:
            assert ratios.roe == pytest.approx(ratios.roa * ratios.leverage, rel=1e-10, abs=1e-10)
            assert abs(ratios.debt + 1.0 / ratios.leverage - 1.0) <= 1e-10
        assert check_dupont(ratios) == []


def test_check_dupont_flags_broken_identity():
    ratios = firm_ratios(FinancialStatement(2, 2, 1, 1, 4, 3))
    broken = type(ratios)(**{**ratios.as_dict(), "roe": 0.9})
    assert check_dupont(broken) == ["roe != roa * leverage"]


def test_ratios_are_scale_invariant(rng):
    parts = random_parts(rng, 1)[0]
    base = firm_ratios(FinancialStatement.from_parts(parts))
    assert firm_ratios(FinancialStatement.from_parts(parts * 4.0)) == base
    scaled = firm_ratios(FinancialStatement.from_parts(parts * 7.3))
    for name in RATIO_ORDER:
        if getattr(base, name) is not None:
            assert getattr(scaled, name) == pytest.approx(getattr(base, name), rel=1e-12)


@pytest.mark.parametrize("year", [2021, 2022, 2023])
def test_center_ratios_reproduce_annual_table(year):
    ratios = center_ratios(sector_center(year))
    for name in RATIO_ORDER:
        assert getattr(ratios, name) == pytest.approx(SECTOR_RATIOS[year][name], abs=0.01), name


def test_center_ratios_quoted_values():
    ratios = center_ratios(sector_center(2021))
    assert ratios.current_asset_turnover == pytest.approx(2.940, abs=0.002)
    assert ratios.profit_margin == pytest.approx(0.047, abs=0.001)


def test_center_ratios_need_six_parts():
    with pytest.raises(DimensionMismatchError):
        center_ratios(CompositionalCenter((0.5, 0.5)))


def test_center_part_ratios_are_geometric_means(rng):
    panel = random_parts(rng, 300)
    c = center_of_matrix(panel).to_array()
    for i, j in itertools.permutations(range(6), 2):
        gm = np.exp(np.mean(np.log(panel[:, i] / panel[:, j])))
        assert c[i] / c[j] == pytest.approx(gm, rel=1e-9)


def _records(rng, n, years=(2021, 2022, 2023), naces=("104", "107")):
    parts = random_parts(rng, n, scale=0.5) * 1000
    return [
        make_record(row, firm_id=f"F{i}", year=years[i % len(years)], nace=naces[i % len(naces)])
        for i, row in enumerate(parts)
    ], parts


def test_single_group_equals_whole_sample(rng):
    records, parts = _records(rng, 12, years=(2021,))
    groups = grouped_center_ratios(records, "year")
    assert len(groups) == 1
    assert groups[0].size == 12
    assert groups[0].ratios == center_ratios(center_of_matrix(parts))


def test_identical_groups_give_identical_ratios(rng):
    parts = random_parts(rng, 5) * 100
    records = [make_record(p, firm_id=f"A{i}", nace="104") for i, p in enumerate(parts)]
    records += [make_record(p, firm_id=f"B{i}", nace="107") for i, p in enumerate(parts)]
    first, second = grouped_center_ratios(records, "nace")
    assert first.ratios == second.ratios


def test_grouped_ratios_match_filter_and_recompute(rng):
    records, parts = _records(rng, 50)
    groups = grouped_center_ratios(records, "year")
    assert [g.key for g in groups] == [(2021,), (2022,), (2023,)]
    for group in groups:
        mask = np.array([r.year == group.key[0] for r in records])
        expected = center_ratios(center_of_matrix(parts[mask]))
        assert group.size == int(mask.sum())
        for name in RATIO_ORDER:
            value = getattr(group.ratios, name)
            if value is None:
                assert getattr(expected, name) is None
            else:
                assert value == pytest.approx(getattr(expected, name), rel=1e-12)


def test_grouping_keys_are_sorted(rng):
    records, _ = _records(rng, 30)
    keys = [g.key for g in grouped_center_ratios(records, "year_nace")]
    assert keys == sorted(keys)
    clusters = [(i % 3) + 1 for i in range(30)]
    by_cluster = grouped_center_ratios(records, "cluster", assignments=clusters)
    assert [g.key for g in by_cluster] == [(1,), (2,), (3,)]


def test_grouping_errors(rng):
    records, _ = _records(rng, 6)
    with pytest.raises(UsageError):
        grouped_center_ratios(records, "country")
    with pytest.raises(UsageError):
        grouped_center_ratios(records, "cluster")


def test_firm_ratio_table_follows_input_order(rng):
    records, parts = _records(rng, 4)
    table = firm_ratio_table(records)
    assert len(table) == 4
    assert table[2] == firm_ratios(FinancialStatement.from_parts(parts[2]))
