"""
Crystal Model
Schema for one nonlinear crystal: dispersion, polarization roles, bounds
"""

from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

# Published indices are quoted to 4-5 decimals
REFERENCE_TOLERANCE = 1e-4
REFERENCE_POINTS_MIN = 3


class SellmeierForm(str, Enum):
    """Closed-form dispersion formulas (lambda in um)"""

    # n^2 = A + sum_j B_j l^2 / (l^2 - C_j)            [A, B1, C1, B2, C2, ...]
    SELLMEIER = "sellmeier"
    # n^2 = A + sum_j B_j l^2 / (l^2 - C_j) - D l^2   [A, D, B1, C1, ...]
    SELLMEIER_IR = "sellmeier_ir"
    # n^2 = A + B / (l^2 - C) - D l^2                 [A, B, C, D]
    POLE_IR = "pole_ir"
    # n^2 = A + B / (l^2 - C) + D / (l^2 - E)         [A, B, C, D, E]
    TWO_POLE = "two_pole"
    # n^2 = A + B / (l^2 - C) + D / (l^2 - E) - F l^2 + G l^4
    TWO_POLE_IR = "two_pole_ir"
    # n^2 = A + B / (l^2 - C) + D l^2 / (l^2 - E)     [A, B, C, D, E]
    ZERNIKE = "zernike"


def _check_arity(form: SellmeierForm, count: int) -> bool:
    if form == SellmeierForm.SELLMEIER:
        return count >= 1 and count % 2 == 1
    if form == SellmeierForm.SELLMEIER_IR:
        return count >= 2 and count % 2 == 0
    fixed = {
        SellmeierForm.POLE_IR: 4,
        SellmeierForm.TWO_POLE: 5,
        SellmeierForm.TWO_POLE_IR: 7,
        SellmeierForm.ZERNIKE: 5,
    }
    return count == fixed[form]


class SellmeierModel(BaseModel):
    """Refractive index of one polarization axis"""

    form_id: SellmeierForm
    coefficients: List[float]
    valid_range_um: Tuple[float, float]
    label: str = ""
    # Published (lambda_um, n) pairs the coefficients must reproduce
    reference_points: List[Tuple[float, float]] = Field(min_length=REFERENCE_POINTS_MIN)

    class Config:
        frozen = True

    def poles(self) -> List[float]:
        """Values of lambda^2 where n^2 diverges"""
        a = self.coefficients
        if self.form_id == SellmeierForm.SELLMEIER:
            return list(a[2::2])
        if self.form_id == SellmeierForm.SELLMEIER_IR:
            return list(a[3::2])
        if self.form_id == SellmeierForm.POLE_IR:
            return [a[2]]
        return [a[2], a[4]]

    def n_squared(self, wavelength_um):
        """Evaluate n^2 without any range check"""
        a = self.coefficients
        l2 = np.asarray(wavelength_um, dtype=float) ** 2
        form = self.form_id

        if form == SellmeierForm.SELLMEIER:
            out = np.full_like(l2, a[0])
            for b, c in zip(a[1::2], a[2::2]):
                out = out + b * l2 / (l2 - c)
            return out
        if form == SellmeierForm.SELLMEIER_IR:
            out = a[0] - a[1] * l2
            for b, c in zip(a[2::2], a[3::2]):
                out = out + b * l2 / (l2 - c)
            return out
        if form == SellmeierForm.POLE_IR:
            return a[0] + a[1] / (l2 - a[2]) - a[3] * l2
        if form == SellmeierForm.TWO_POLE:
            return a[0] + a[1] / (l2 - a[2]) + a[3] / (l2 - a[4])
        if form == SellmeierForm.TWO_POLE_IR:
            return (a[0] + a[1] / (l2 - a[2]) + a[3] / (l2 - a[4])
                    - a[5] * l2 + a[6] * l2 ** 2)
        # ZERNIKE
        return a[0] + a[1] / (l2 - a[2]) + a[3] * l2 / (l2 - a[4])

    @model_validator(mode="after")
    def check_invariants(self):
        lo, hi = self.valid_range_um
        if not 0 < lo < hi:
            raise ValueError(f"invalid valid_range_um {self.valid_range_um}")
        if not _check_arity(self.form_id, len(self.coefficients)):
            raise ValueError(
                f"{len(self.coefficients)} coefficients do not fit form '{self.form_id.value}'"
            )
        for pole in self.poles():
            if lo ** 2 <= pole <= hi ** 2:
                raise ValueError(f"pole at lambda^2={pole} inside valid range of '{self.label}'")
        n2 = self.n_squared(np.linspace(lo, hi, 257))
        if not np.all(np.isfinite(n2)) or np.any(n2 < 1.0):
            raise ValueError(f"model '{self.label}' gives n < 1 or non-finite n in its range")
        for wavelength_um, published in self.reference_points:
            if not lo <= wavelength_um <= hi:
                raise ValueError(f"reference point at {wavelength_um} um outside valid range of '{self.label}'")
            n = float(np.sqrt(self.n_squared(wavelength_um)))
            if abs(n - published) > REFERENCE_TOLERANCE:
                raise ValueError(
                    f"'{self.label}' gives n({wavelength_um} um) = {n:.6f}, reference point says {published}"
                )
        return self


class Roles(BaseModel):
    """Polarization label carried by each field"""

    pump: str
    signal: str
    idler: str

    class Config:
        frozen = True

    def get(self, role: str) -> str:
        if role not in ("pump", "signal", "idler"):
            raise ValueError(f"Unknown role: {role}")
        return getattr(self, role)


class ParameterBounds(BaseModel):
    """Optimizer box on (crystal length, pump FWHM)"""

    length_mm: Tuple[float, float] = Field(alias="L_mm")
    pump_fwhm_nm: Tuple[float, float]

    class Config:
        frozen = True
        populate_by_name = True

    @model_validator(mode="after")
    def check_order(self):
        if not 0 < self.length_mm[0] < self.length_mm[1]:
            raise ValueError(f"invalid length bounds {self.length_mm}")
        if not 0 < self.pump_fwhm_nm[0] < self.pump_fwhm_nm[1]:
            raise ValueError(f"invalid pump bandwidth bounds {self.pump_fwhm_nm}")
        return self

    def midpoint(self) -> Tuple[float, float]:
        return (
            0.5 * (self.length_mm[0] + self.length_mm[1]),
            0.5 * (self.pump_fwhm_nm[0] + self.pump_fwhm_nm[1]),
        )

    def contains(self, length_mm: float, pump_fwhm_nm: float) -> bool:
        return (self.length_mm[0] <= length_mm <= self.length_mm[1]
                and self.pump_fwhm_nm[0] <= pump_fwhm_nm <= self.pump_fwhm_nm[1])


class GridDefaults(BaseModel):
    """Default JSA wavelength window and resolution"""

    lambda_nm: Tuple[float, float]
    points: int

    class Config:
        frozen = True


class CrystalSpec(BaseModel):
    """Nonlinear crystal catalog entry"""

    name: str
    pm_type: Literal["periodically_poled", "birefringent_angle"]
    gvm_condition: Literal["symmetric", "asymmetric"]
    # Photon matched to the pump when gvm_condition is asymmetric
    gvm_photon: Optional[Literal["signal", "idler"]] = None
    roles: Roles
    models: Dict[str, SellmeierModel]
    bounds: ParameterBounds
    grid: GridDefaults
    pm_shapes: List[Literal["sinc", "gaussian_apodized"]] = Field(default_factory=lambda: ["sinc"])
    # Display names per phase-matching shape, e.g. {"sinc": "ppKTP"}
    labels: Dict[str, str] = Field(default_factory=dict)
    source: str = ""

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_roles(self):
        for role in ("pump", "signal", "idler"):
            if self.roles.get(role) not in self.models:
                raise ValueError(f"role '{role}' maps to unknown polarization '{self.roles.get(role)}'")
        if self.gvm_condition == "asymmetric" and self.gvm_photon is None:
            raise ValueError("asymmetric GVM needs gvm_photon")
        if self.pm_type == "birefringent_angle":
            if not {"o", "e"} <= set(self.models):
                raise ValueError("angle-tuned crystals need 'o' and 'e' models")
            if "gaussian_apodized" in self.pm_shapes:
                raise ValueError("gaussian apodization needs a poled crystal")
        return self

    def is_angle_dependent(self, role: str) -> bool:
        """Whether a role's index depends on the cut angle"""
        return self.pm_type == "birefringent_angle" and self.roles.get(role) == "e"

    def display_name(self, pm_shape: str) -> str:
        return self.labels.get(pm_shape, self.name)
