"""
Source Models
Pump, operating point, frequency grid, discretized JSA and herald filter
"""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, model_validator

from spdcopt.models.crystal import CrystalSpec
from spdcopt.utils.units import nm_to_omega, omega_to_nm


PmShape = Literal["sinc", "gaussian_apodized"]


class PumpSpec(BaseModel):
    """Gaussian pump pulse; bandwidth is the FWHM of the field amplitude"""

    center_nm: float
    fwhm_nm: float

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_positive(self):
        if self.center_nm <= 0 or self.fwhm_nm <= 0:
            raise ValueError(f"pump needs positive centre and FWHM, got {self.center_nm}, {self.fwhm_nm}")
        return self


class SourceConfig(BaseModel):
    """Concrete SPDC operating point"""

    crystal: CrystalSpec
    pump: PumpSpec
    length_mm: float
    # Poling wavevector K0 (rad/m) for poled crystals, cut angle theta (rad) otherwise
    pm_offset: float
    pm_shape: PmShape = "sinc"

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_bounds(self):
        bounds = self.crystal.bounds
        if not bounds.contains(self.length_mm, self.pump.fwhm_nm):
            raise ValueError(
                f"(L={self.length_mm} mm, pump FWHM={self.pump.fwhm_nm} nm) outside bounds "
                f"{bounds.length_mm} x {bounds.pump_fwhm_nm} of {self.crystal.name}"
            )
        if self.pm_shape not in self.crystal.pm_shapes:
            raise ValueError(f"{self.crystal.name} does not support pm_shape '{self.pm_shape}'")
        return self

    @property
    def theta(self) -> Optional[float]:
        """Cut angle for angle-tuned crystals"""
        if self.crystal.pm_type == "birefringent_angle":
            return self.pm_offset
        return None

    @property
    def poling_k(self) -> float:
        """Grating wavevector subtracted in the phase mismatch"""
        if self.crystal.pm_type == "periodically_poled":
            return self.pm_offset
        return 0.0


class FrequencyGrid(BaseModel):
    """Uniform-in-wavelength sampling shared by the signal and idler axes"""

    lambda_min_nm: float
    lambda_max_nm: float
    points: int

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_grid(self):
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        if not 0 < self.lambda_min_nm < self.lambda_max_nm:
            raise ValueError(f"degenerate grid bounds [{self.lambda_min_nm}, {self.lambda_max_nm}] nm")
        return self

    @property
    def wavelengths_nm(self) -> np.ndarray:
        return np.linspace(self.lambda_min_nm, self.lambda_max_nm, self.points)

    @property
    def omega(self) -> np.ndarray:
        """Angular frequencies (rad/s), descending with wavelength"""
        return nm_to_omega(self.wavelengths_nm)

    def with_points(self, points: int) -> "FrequencyGrid":
        return FrequencyGrid(lambda_min_nm=self.lambda_min_nm, lambda_max_nm=self.lambda_max_nm, points=points)


class JointAmplitude(BaseModel):
    """Discretized real JSA f(omega_s, omega_i); rows are signal, columns idler"""

    values: np.ndarray
    signal_omega: np.ndarray
    idler_omega: np.ndarray

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @model_validator(mode="before")
    @classmethod
    def copy_arrays(cls, data):
        if isinstance(data, dict):
            data = dict(data)
            for key in ("values", "signal_omega", "idler_omega"):
                if key in data:
                    data[key] = np.array(data[key], dtype=float)
        return data

    @model_validator(mode="after")
    def check_shape(self):
        if self.values.ndim != 2:
            raise ValueError(f"JSA must be 2-D, got shape {self.values.shape}")
        if self.values.shape != (len(self.signal_omega), len(self.idler_omega)):
            raise ValueError(
                f"JSA shape {self.values.shape} does not match axes "
                f"({len(self.signal_omega)}, {len(self.idler_omega)})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("JSA contains non-finite entries")
        # Own copies; the caller's arrays stay writable
        for arr in (self.values, self.signal_omega, self.idler_omega):
            arr.setflags(write=False)
        return self

    @classmethod
    def from_grid(cls, values: np.ndarray, grid: FrequencyGrid) -> "JointAmplitude":
        """Amplitude sampled on the same grid for signal and idler"""
        return cls(values=values, signal_omega=grid.omega, idler_omega=grid.omega)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def signal_nm(self) -> np.ndarray:
        return omega_to_nm(self.signal_omega)

    @property
    def idler_nm(self) -> np.ndarray:
        return omega_to_nm(self.idler_omega)

    def with_values(self, values: np.ndarray) -> "JointAmplitude":
        return JointAmplitude(
            values=np.asarray(values, dtype=float),
            signal_omega=self.signal_omega,
            idler_omega=self.idler_omega,
        )

    def same_grid(self, other: "JointAmplitude") -> bool:
        return (self.shape == other.shape
                and np.array_equal(self.signal_omega, other.signal_omega)
                and np.array_equal(self.idler_omega, other.idler_omega))


class FilterSpec(BaseModel):
    """Herald-side bandpass filter, centred on the degenerate wavelength"""

    shape: Literal["none", "gaussian", "rectangular"] = "none"
    fwhm_nm: Optional[float] = None
    width_nm: Optional[float] = None
    center_nm: Optional[float] = None
    target: Literal["idler", "signal"] = "idler"
    convention: Literal["field", "intensity"] = "field"

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_width(self):
        if self.shape == "gaussian" and not (self.fwhm_nm and self.fwhm_nm > 0):
            raise ValueError("gaussian filter needs fwhm_nm > 0")
        if self.shape == "rectangular" and not (self.width_nm and self.width_nm > 0):
            raise ValueError("rectangular filter needs width_nm > 0")
        return self

    @classmethod
    def of(cls, shape: str, bandwidth_nm: Optional[float] = None,
           center_nm: Optional[float] = None, convention: str = "field") -> "FilterSpec":
        """Build a filter from a single bandwidth number"""
        if shape == "gaussian":
            return cls(shape=shape, fwhm_nm=bandwidth_nm, center_nm=center_nm, convention=convention)
        if shape == "rectangular":
            return cls(shape=shape, width_nm=bandwidth_nm, center_nm=center_nm, convention=convention)
        return cls(shape="none", center_nm=center_nm, convention=convention)

    @property
    def bandwidth_nm(self) -> Optional[float]:
        if self.shape == "gaussian":
            return self.fwhm_nm
        if self.shape == "rectangular":
            return self.width_nm
        return None

    def centered(self, center_nm: float) -> "FilterSpec":
        return self.model_copy(update={"center_nm": center_nm})
