"""
Result Models
Purity, source quality, optimizer and sweep outputs
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from spdcopt.models.crystal import CrystalSpec, ParameterBounds
from spdcopt.models.source import FilterSpec, FrequencyGrid, PmShape

# Slack for round-off in probabilities computed from norms
_EPS = 1e-9


class SchmidtResult(BaseModel):
    """Schmidt spectrum of a JSA"""

    schmidt_coeffs: np.ndarray
    K: float
    P: float

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @model_validator(mode="after")
    def check_normalized(self):
        if abs(float(np.sum(self.schmidt_coeffs)) - 1.0) > 1e-10:
            raise ValueError("Schmidt coefficients must sum to 1")
        if self.K < 1.0 - 1e-12 or not 0.0 < self.P <= 1.0 + 1e-12:
            raise ValueError(f"invalid Schmidt number {self.K} / purity {self.P}")
        self.schmidt_coeffs.setflags(write=False)
        return self


class SourceMetrics(BaseModel):
    """Heralded-source figures of merit"""

    purity: float
    transmission: float
    alpha: float
    k_max: int
    purity_unfiltered: Optional[float] = None

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_ranges(self):
        for name in ("purity", "transmission", "alpha"):
            value = getattr(self, name)
            if not -_EPS <= value <= 1 + _EPS:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.alpha > min(self.purity, self.transmission) + _EPS:
            raise ValueError(f"alpha={self.alpha} exceeds min(purity, transmission)")
        if self.k_max < 0:
            raise ValueError(f"k_max={self.k_max} must be non-negative")
        return self

    @property
    def indistinguishability(self) -> float:
        """x^2, equal to the heralded purity in this model"""
        return self.purity


class ComplexityBudget(BaseModel):
    """Loss budget left for a k-photon experiment at error bound E"""

    error_bound: float = 0.1
    target_k: int = 50
    alpha_required: float
    alpha_opt: Optional[float] = None
    eta_budget: Optional[float] = None
    feasible: bool = True

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_budget(self):
        if not 0.0 < self.alpha_required < 1.0:
            raise ValueError(f"alpha_required={self.alpha_required} outside (0, 1)")
        if self.eta_budget is not None and self.eta_budget > 1.0 + _EPS:
            raise ValueError(f"eta_budget={self.eta_budget} exceeds 1")
        return self


class OptimizationProblem(BaseModel):
    """Bounded maximization of alpha over (L, pump FWHM) for one filter"""

    crystal: CrystalSpec
    pm_shape: PmShape = "sinc"
    filter: FilterSpec
    grid: FrequencyGrid
    bounds: ParameterBounds
    start: Tuple[float, float]
    center_nm: float
    pm_offset: float
    error_bound: float = 0.1

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_start(self):
        if not self.bounds.contains(*self.start):
            raise ValueError(f"start {self.start} outside bounds")
        return self

    @property
    def pump_center_nm(self) -> float:
        return self.center_nm / 2


class OptimalPoint(BaseModel):
    """Best (L, pump FWHM) found for one filter"""

    length_mm: float
    pump_fwhm_nm: float
    metrics: SourceMetrics
    evaluations: int = 0
    converged: bool = True
    start_alpha: Optional[float] = None

    class Config:
        frozen = True

    @property
    def purity_unfiltered(self) -> Optional[float]:
        return self.metrics.purity_unfiltered

    @property
    def alpha(self) -> float:
        return self.metrics.alpha


class SweepRow(BaseModel):
    """One filter bandwidth of a sweep"""

    filter_fwhm_nm: float
    point: OptimalPoint
    k_max: int

    class Config:
        frozen = True


class SweepResult(BaseModel):
    """Optimum per filter bandwidth"""

    crystal: str
    pm_shape: str
    filter_shape: str
    rows: List[SweepRow] = Field(default_factory=list)
    best_row: int = 0

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_rows(self):
        widths = [row.filter_fwhm_nm for row in self.rows]
        if widths != sorted(widths):
            raise ValueError("sweep rows must be sorted by filter bandwidth")
        if self.rows:
            alphas = [row.point.alpha for row in self.rows]
            if alphas[self.best_row] != max(alphas):
                raise ValueError("best_row does not attain the maximum alpha")
        return self

    @property
    def best(self) -> SweepRow:
        return self.rows[self.best_row]


class ConvergencePoint(BaseModel):
    """Alpha at one grid resolution against the reference resolution"""

    points: int
    alpha: float
    deviation: float

    class Config:
        frozen = True


class TableRow(BaseModel):
    """One line of the alpha_opt / loss budget table"""

    crystal: str
    pm_shape: str
    filter_shape: str
    alpha_opt: float
    eta_tb: Optional[float]
    lambda_c_nm: float
    length_mm: float
    pump_fwhm_nm: float
    filter_fwhm_nm: Optional[float]
    k_max: int
    feasible: bool
    filter_break_even: Optional[float] = None

    class Config:
        frozen = True
