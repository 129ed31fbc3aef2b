"""
Shared helpers for task runners
"""

from typing import Optional

from spdcopt.config import settings
from spdcopt.errors import ConfigurationError
from spdcopt.models.crystal import CrystalSpec
from spdcopt.models.run import RunConfig
from spdcopt.models.source import FilterSpec, FrequencyGrid
from spdcopt.services.jsa import make_grid
from spdcopt.utils.catalog import Catalog


def crystal_for(run: RunConfig) -> CrystalSpec:
    """Catalog entry named by the run"""
    if not run.crystal:
        raise ConfigurationError("no crystal given")
    return Catalog.get(run.crystal)


def grid_for(crystal: CrystalSpec, run: RunConfig, points: Optional[int] = None) -> FrequencyGrid:
    """Catalog grid with the run's span and resolution overrides"""
    lo, hi = run.lambda_nm or crystal.grid.lambda_nm
    return make_grid(lo, hi, points or run.grid_n or crystal.grid.points)


def filter_for(run: RunConfig, center_nm: Optional[float] = None) -> FilterSpec:
    """Single-bandwidth herald filter of the run"""
    if run.filter_shape != "none" and run.fwhm_nm is None:
        raise ConfigurationError(f"{run.filter_shape} filter needs a bandwidth (--fwhm-nm)")
    return FilterSpec.of(run.filter_shape, run.fwhm_nm, center_nm, settings.FILTER_FWHM_CONVENTION)


def artifact_name(crystal: CrystalSpec, run: RunConfig, kind: str) -> str:
    """Stable file stem, e.g. sweep_ktp_sinc_gaussian"""
    return f"{kind}_{crystal.name.lower()}_{run.pm_shape}_{run.filter_shape}"
