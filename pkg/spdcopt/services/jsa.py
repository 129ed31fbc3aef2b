"""
Joint Spectral Amplitude Service
Pump envelope x phase matching on a wavelength grid, plus herald filtering
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from pydantic import ValidationError

from spdcopt.config import max_grid_points, settings
from spdcopt.errors import (
    ConfigurationError,
    PreconditionError,
    ResourceGuardError,
    UnsupportedConfigurationError,
)
from spdcopt.models.source import FilterSpec, FrequencyGrid, JointAmplitude, PumpSpec, SourceConfig
from spdcopt.services.dispersion import phase_mismatch_raw, wavevector
from spdcopt.utils.units import (
    bandwidth_nm_to_omega,
    nm_to_omega,
    omega_to_nm,
    sigma_from_fwhm,
)

logger = logging.getLogger(__name__)

# Gaussian apodization width factor matching the sinc main lobe
APODIZATION_GAMMA = 0.193


def make_grid(lambda_min_nm: float, lambda_max_nm: float, points: int) -> FrequencyGrid:
    """
    Uniform wavelength grid shared by both photons (endpoints included)

    Args:
        lambda_min_nm: Lower wavelength bound
        lambda_max_nm: Upper wavelength bound
        points: Samples per axis

    Returns:
        FrequencyGrid
    """
    try:
        return FrequencyGrid(lambda_min_nm=lambda_min_nm, lambda_max_nm=lambda_max_nm, points=points)
    except ValidationError as e:
        raise ConfigurationError(f"invalid grid ({lambda_min_nm}, {lambda_max_nm}, {points}): {e}") from e


def check_grid_memory(points: int, memory_cap_mb: Optional[int] = None) -> None:
    """Refuse grids whose dense N x N matrix exceeds the memory cap"""
    limit = max_grid_points(memory_cap_mb)
    if points > limit:
        cap = settings.MEMORY_CAP_MB if memory_cap_mb is None else memory_cap_mb
        raise ResourceGuardError(
            f"{points}x{points} JSA exceeds memory cap of {cap} MB (max {limit} points per axis)"
        )


def pump_sigma(pump: PumpSpec) -> float:
    """Gaussian width (rad/s) of the pump field from its FWHM in nm"""
    return sigma_from_fwhm(bandwidth_nm_to_omega(pump.fwhm_nm, pump.center_nm), "field")


def pump_envelope(omega_s, omega_i, pump: PumpSpec):
    """exp(-(omega_s + omega_i - omega_p)^2 / (4 sigma_p^2))"""
    omega_p = nm_to_omega(pump.center_nm)
    sigma = pump_sigma(pump)
    detuning = np.asarray(omega_s, dtype=float) + np.asarray(omega_i, dtype=float) - omega_p
    return np.exp(-detuning ** 2 / (4 * sigma ** 2))


def phase_mismatch(config: SourceConfig, omega_s, omega_i):
    """Delta k (rad/m) of the operating point at (omega_s, omega_i)"""
    return phase_mismatch_raw(config.crystal, omega_s, omega_i, config.theta, config.poling_k)


def phase_matching(delta_k, length_mm: float, shape: str = "sinc"):
    """
    Phase-matching amplitude

    Args:
        delta_k: Phase mismatch in rad/m
        length_mm: Crystal length in mm
        shape: "sinc" (uniform poling) or "gaussian_apodized"

    Returns:
        sinc(Delta k L / 2) or exp(-gamma Delta k^2 L^2 / 4)
    """
    if length_mm <= 0:
        raise ConfigurationError(f"crystal length must be positive, got {length_mm}")
    length_m = length_mm * 1e-3
    delta_k = np.asarray(delta_k, dtype=float)
    if shape == "sinc":
        # np.sinc is sin(pi x) / (pi x)
        return np.sinc(delta_k * length_m / 2 / np.pi)
    if shape == "gaussian_apodized":
        return np.exp(-APODIZATION_GAMMA * delta_k ** 2 * length_m ** 2 / 4)
    raise ConfigurationError(f"Unknown phase-matching shape: {shape}")


def assemble_jsa(config: SourceConfig, grid: FrequencyGrid,
                 block_rows: Optional[int] = None, workers: Optional[int] = None) -> JointAmplitude:
    """
    Discretized JSA f = pump envelope x phase matching (not normalized)

    Rows (signal) are filled in blocks so that the 2-D pump wavevector never
    exists for the whole grid at once; blocks may run on a thread pool.
    """
    check_grid_memory(grid.points)
    block_rows = block_rows or settings.JSA_BLOCK_ROWS
    workers = workers or settings.JSA_WORKERS

    omega = grid.omega
    theta, poling_k = config.theta, config.poling_k
    k_s = wavevector(config.crystal, "signal", omega, theta)
    k_i = wavevector(config.crystal, "idler", omega, theta)
    values = np.empty((grid.points, grid.points), dtype=float)

    def fill(start: int) -> None:
        stop = min(start + block_rows, grid.points)
        omega_s = omega[start:stop, None]
        omega_i = omega[None, :]
        k_p = wavevector(config.crystal, "pump", omega_s + omega_i, theta)
        delta_k = k_p - k_s[start:stop, None] - k_i[None, :] - poling_k
        values[start:stop] = (pump_envelope(omega_s, omega_i, config.pump)
                              * phase_matching(delta_k, config.length_mm, config.pm_shape))

    starts = range(0, grid.points, block_rows)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)

    return JointAmplitude.from_grid(values, grid)


def filter_transmission(spec: FilterSpec, omega):
    """
    Amplitude transmission t in [0, 1] of a bandpass filter

    Gaussian and rectangular windows are defined in wavelength around
    spec.center_nm; "none" passes everything.
    """
    omega = np.asarray(omega, dtype=float)
    if spec.shape == "none":
        t = np.ones_like(omega)
    else:
        if spec.center_nm is None:
            raise PreconditionError("filter centre wavelength is not set")
        offset = omega_to_nm(omega) - spec.center_nm
        if spec.shape == "gaussian":
            factor = 4.0 if spec.convention == "field" else 2.0
            t = np.exp(-factor * np.log(2.0) * offset ** 2 / spec.fwhm_nm ** 2)
        else:
            t = (np.abs(offset) <= spec.width_nm / 2).astype(float)
    return float(t) if t.ndim == 0 else t


def apply_herald_filter(jsa: JointAmplitude, spec: FilterSpec) -> JointAmplitude:
    """Multiply every idler column by the filter transmission"""
    if spec.target != "idler":
        raise UnsupportedConfigurationError("only the herald (idler) photon can be filtered")
    if spec.shape == "none":
        return jsa
    t = filter_transmission(spec, jsa.idler_omega)
    return jsa.with_values(jsa.values * t[None, :])


def joint_intensity(jsa: JointAmplitude) -> np.ndarray:
    """JSI = |JSA|^2"""
    return jsa.values ** 2


def marginal_spectra(jsa: JointAmplitude) -> Tuple[np.ndarray, np.ndarray]:
    """Signal and idler marginal intensity spectra, each summing to 1"""
    jsi = joint_intensity(jsa)
    total = jsi.sum()
    if total == 0:
        return np.zeros(jsi.shape[0]), np.zeros(jsi.shape[1])
    return jsi.sum(axis=1) / total, jsi.sum(axis=0) / total
