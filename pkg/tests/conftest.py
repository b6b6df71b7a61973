import numpy as np
import pytest

from src.pipeline.records import HEADER, FirmYearRecord

# Sector centers (x1..x6) for 2021-2023, rounded to 4 decimals
SECTOR_CENTERS = {
    2021: (0.0730, 0.1237, 0.0200, 0.0728, 0.3638, 0.3467),
    2022: (0.0712, 0.1145, 0.0155, 0.0711, 0.3712, 0.3565),
    2023: (0.0696, 0.1175, 0.0129, 0.0696, 0.3773, 0.3531),
}

RATIO_ORDER = (
    "turnover", "current_asset_turnover", "profit_margin", "leverage", "roa", "roe",
    "debt", "short_term_debt", "long_term_solvency", "short_term_solvency",
    "asset_tangibility", "debt_maturity",
)

# Annual mean ratios reported for the same centers, 3 decimals
SECTOR_RATIOS = {
    2021: dict(zip(RATIO_ORDER, (1.849, 2.940, 0.047, 1.893, 0.086, 0.164,
                                 0.471, 0.370, 2.120, 1.699, 0.590, 0.274))),
    2022: dict(zip(RATIO_ORDER, (1.998, 3.241, 0.039, 1.873, 0.079, 0.148,
                                 0.466, 0.382, 2.144, 1.610, 0.621, 0.218))),
    2023: dict(zip(RATIO_ORDER, (2.016, 3.211, 0.064, 1.788, 0.129, 0.231,
                                 0.440, 0.371, 2.268, 1.688, 0.592, 0.185))),
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_parts(rng, n, D=6, scale=1.0):
    return np.exp(rng.normal(0.0, scale, size=(n, D)))


def make_record(parts, firm_id="F1", year=2021, nace="104", employees=25, legal_form="sl",
                importer="false", exporter="false", line=None):
    return FirmYearRecord(
        firm_id=firm_id, year=year, nace=nace, legal_form=legal_form, employees=employees,
        importer=importer, exporter=exporter, line=line,
        **{f"x{j + 1}": float(v) for j, v in enumerate(parts)},
    )


def write_panel(path, rows):
    """Write rows (dicts keyed by the input header) as an input CSV."""
    lines = [",".join(HEADER)]
    for row in rows:
        lines.append(",".join(str(row[col]) for col in HEADER))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def panel_row(firm_id, year, parts, employees=25, nace="104", legal_form="private_limited",
              importer="false", exporter="true"):
    row = {
        "firm_id": firm_id, "year": year, "nace": nace, "legal_form": legal_form,
        "employees": employees, "importer": importer, "exporter": exporter,
    }
    row.update({f"x{j + 1}": p for j, p in enumerate(parts)})
    return row
