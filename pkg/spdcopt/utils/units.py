"""
Unit Conversion Utilities
Wavelength <-> angular frequency and FWHM <-> Gaussian width conversions
"""

import numpy as np
from scipy.constants import c

SQRT_LN2 = np.sqrt(np.log(2.0))


def nm_to_omega(wavelength_nm):
    """Vacuum wavelength (nm) to angular frequency (rad/s)"""
    return 2 * np.pi * c / (np.asarray(wavelength_nm, dtype=float) * 1e-9)


def omega_to_nm(omega):
    """Angular frequency (rad/s) to vacuum wavelength (nm)"""
    return 2 * np.pi * c / np.asarray(omega, dtype=float) * 1e9


def omega_to_um(omega):
    """Angular frequency (rad/s) to vacuum wavelength (um), the Sellmeier unit"""
    return 2 * np.pi * c / np.asarray(omega, dtype=float) * 1e6


def bandwidth_nm_to_omega(fwhm_nm: float, center_nm: float) -> float:
    """
    Convert a wavelength FWHM into an angular-frequency FWHM

    Args:
        fwhm_nm: Bandwidth in nm
        center_nm: Centre wavelength in nm

    Returns:
        Delta omega = 2 pi c Delta lambda / lambda^2 (rad/s)
    """
    return 2 * np.pi * c * (fwhm_nm * 1e-9) / (center_nm * 1e-9) ** 2


def sigma_from_fwhm(fwhm_omega: float, convention: str = "field") -> float:
    """
    Width sigma of an amplitude exp(-nu^2 / (4 sigma^2)) with the given FWHM

    "field": the amplitude itself is 1/2 at nu = FWHM/2.
    "intensity": the squared amplitude is 1/2 at nu = FWHM/2.
    """
    if convention == "field":
        return fwhm_omega / (4 * SQRT_LN2)
    if convention == "intensity":
        return fwhm_omega / (2 * np.sqrt(2 * np.log(2.0)))
    raise ValueError(f"Unknown FWHM convention: {convention}")
