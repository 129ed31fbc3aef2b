"""
Shared fixtures for the spdcopt test suite
"""

import pytest

from spdcopt.models.crystal import CrystalSpec
from spdcopt.models.source import FilterSpec, PumpSpec, SourceConfig
from spdcopt.services.dispersion import find_gvm_center, solve_pm_offset
from spdcopt.services.jsa import make_grid
from spdcopt.utils.catalog import Catalog


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow reproduction tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


VACUUM = {
    "name": "vacuum",
    "pm_type": "periodically_poled",
    "gvm_condition": "symmetric",
    "roles": {"pump": "v", "signal": "v", "idler": "v"},
    "models": {
        "v": {
            "form_id": "sellmeier",
            "coefficients": [1.0],
            "valid_range_um": [0.1, 100.0],
            "label": "vacuum",
            "reference_points": [[0.5, 1.0], [1.0, 1.0], [2.0, 1.0]],
        },
    },
    "bounds": {"L_mm": [0.5, 30.0], "pump_fwhm_nm": [0.1, 30.0]},
    "grid": {"lambda_nm": [780.0, 880.0], "points": 32},
}


@pytest.fixture(autouse=True)
def fresh_catalog(monkeypatch):
    """Every test starts from the packaged catalog with an empty cache"""
    monkeypatch.delenv("SPDC_CATALOG_DIR", raising=False)
    Catalog.clear()
    yield
    Catalog.clear()


@pytest.fixture
def vacuum_crystal():
    """Dispersionless stub: n = 1 for every field"""
    return CrystalSpec.model_validate(VACUUM)


@pytest.fixture
def vacuum_config(vacuum_crystal):
    return SourceConfig(
        crystal=vacuum_crystal,
        pump=PumpSpec(center_nm=415.0, fwhm_nm=2.0),
        length_mm=10.0,
        pm_offset=solve_pm_offset(vacuum_crystal, 415.0, 830.0, 830.0),
    )


@pytest.fixture
def small_grid():
    return make_grid(780.0, 880.0, 32)


@pytest.fixture
def ktp():
    return Catalog.get("ktp")


@pytest.fixture
def bbo():
    return Catalog.get("bbo")


@pytest.fixture
def kdp():
    return Catalog.get("kdp")


@pytest.fixture(scope="session")
def ktp_center():
    return find_gvm_center(Catalog.get("ktp"))


@pytest.fixture
def ktp_config(ktp, ktp_center):
    """ppKTP at the degenerate point, L = 10 mm, 1 nm pump"""
    return SourceConfig(
        crystal=ktp,
        pump=PumpSpec(center_nm=ktp_center / 2, fwhm_nm=1.0),
        length_mm=10.0,
        pm_offset=solve_pm_offset(ktp, ktp_center / 2, ktp_center, ktp_center),
    )


@pytest.fixture
def ktp_grid(ktp_center):
    """Narrow window around the KTP degenerate wavelength"""
    return make_grid(ktp_center - 25.0, ktp_center + 25.0, 64)


@pytest.fixture
def no_filter():
    return FilterSpec()
