"""
Run Configuration Model
What one CLI invocation computes; loaded from JSON and overridden by flags
"""

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from spdcopt.config import settings


class RunConfig(BaseModel):
    """Run configuration"""

    crystal: Optional[str] = None
    pm_shape: Literal["sinc", "gaussian_apodized"] = "sinc"
    filter_shape: Literal["none", "gaussian", "rectangular"] = "gaussian"
    bandwidths: Optional[List[float]] = None
    fwhm_nm: Optional[float] = None
    grid_n: Optional[int] = None
    lambda_nm: Optional[Tuple[float, float]] = None
    error_bound: float = Field(default_factory=lambda: settings.DEFAULT_ERROR_BOUND)
    target_k: int = Field(default_factory=lambda: settings.DEFAULT_TARGET_K)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    warm_start: bool = True
    workers: int = Field(default_factory=lambda: settings.SWEEP_WORKERS)
    resolutions: Optional[List[int]] = None
    reference_n: Optional[int] = None
    pair: bool = False
    length_mm: Optional[float] = None
    pump_fwhm_nm: Optional[float] = None

    @model_validator(mode="after")
    def check_run(self):
        if not 0.0 < self.error_bound < 1.0:
            raise ValueError(f"error bound {self.error_bound} outside (0, 1)")
        if self.target_k < 1:
            raise ValueError(f"target photon number {self.target_k} must be >= 1")
        if self.bandwidths is not None:
            if not self.bandwidths or any(b <= 0 for b in self.bandwidths):
                raise ValueError("bandwidth list must be non-empty and positive")
        if self.grid_n is not None and self.grid_n < 2:
            raise ValueError(f"grid size {self.grid_n} must be >= 2")
        return self
