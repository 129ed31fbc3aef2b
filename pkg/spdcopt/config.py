"""
Configuration Management for spdcopt
Loads environment variables and provides app-wide numerical settings
"""

import os
from pathlib import Path
from typing import Literal

from pydantic_settings import BaseSettings


PACKAGE_DIR = Path(__file__).resolve().parent


class Settings(BaseSettings):
    """Application Settings"""

    # Environment
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"

    # Crystal catalog (one JSON file per crystal)
    SPDC_CATALOG_DIR: str = str(PACKAGE_DIR / "catalog")

    # Boson-sampling target
    DEFAULT_ERROR_BOUND: float = 0.1
    DEFAULT_TARGET_K: int = 50
    K_CONVENTION: Literal["alpha_k", "alpha_k_plus_1"] = "alpha_k"

    # Spectral model
    FILTER_FWHM_CONVENTION: Literal["field", "intensity"] = "field"
    TRANSMISSION_METHOD: Literal["norm_ratio", "inner_product", "fidelity"] = "norm_ratio"
    PURITY_METHOD: Literal["svd", "gram"] = "svd"

    # JSA assembly
    JSA_BLOCK_ROWS: int = 256
    JSA_WORKERS: int = 1
    MEMORY_CAP_MB: int = 2048

    # Optimizer (L-BFGS-B on the unit box)
    OPTIMIZER_FTOL: float = 1e-6
    OPTIMIZER_GTOL: float = 1e-7
    OPTIMIZER_FD_STEP: float = 1e-4
    OPTIMIZER_MAXITER: int = 200
    BOUND_SNAP: float = 1e-6

    # Filter-bandwidth sweeps
    SWEEP_MIN_NM: float = 1.0
    SWEEP_MAX_NM: float = 200.0
    SWEEP_POINTS: int = 24
    SWEEP_WORKERS: int = 1

    # Output
    OUTPUT_DIR: str = "results"
    FLOAT_DIGITS: int = 6

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


# Global settings instance
settings = Settings()


def get_catalog_dir() -> Path:
    """Get crystal catalog directory (env var wins over settings)"""
    return Path(os.getenv("SPDC_CATALOG_DIR", settings.SPDC_CATALOG_DIR))


def max_grid_points(memory_cap_mb: int | None = None) -> int:
    """Largest N for which one dense N x N float64 JSA fits under the cap"""
    cap = settings.MEMORY_CAP_MB if memory_cap_mb is None else memory_cap_mb
    return int((cap * 1024 * 1024 / 8) ** 0.5)
