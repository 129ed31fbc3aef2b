"""
Dispersion Service
Refractive indices, wavevectors, group velocities, group-velocity matching
and the phase-matching offset (poling wavevector or cut angle)
"""

import logging
from typing import Optional

import numpy as np
from scipy.constants import c
from scipy.optimize import bisect

from spdcopt.errors import (
    DispersionRangeError,
    NoRootError,
    PreconditionError,
)
from spdcopt.models.crystal import CrystalSpec, SellmeierModel
from spdcopt.utils.units import nm_to_omega, omega_to_um

logger = logging.getLogger(__name__)

# Relative finite-difference step in omega for k'
GROUP_VELOCITY_STEP = 1e-6
# Bisection tolerance on the degenerate wavelength (nm)
GVM_XTOL_NM = 1e-3
# Coarse scan used to bracket the matching condition
GVM_SCAN_POINTS = 81
# Angle bracket kept off the exact axes
THETA_MARGIN = 1e-6


def refractive_index(model: SellmeierModel, wavelength_um):
    """
    Evaluate n(lambda) for one Sellmeier model

    Args:
        model: Dispersion model
        wavelength_um: Scalar or array of vacuum wavelengths in um

    Returns:
        Refractive index, same shape as the input
    """
    lam = np.asarray(wavelength_um, dtype=float)
    lo, hi = model.valid_range_um
    outside = (lam < lo) | (lam > hi) | ~np.isfinite(lam)
    if np.any(outside):
        bad = float(np.atleast_1d(lam)[np.atleast_1d(outside)][0])
        raise DispersionRangeError(model.label or model.form_id.value, bad, (lo, hi))
    n = np.sqrt(model.n_squared(lam))
    return float(n) if n.ndim == 0 else n


def angle_index(crystal: CrystalSpec, wavelength_um, theta: float):
    """Extraordinary index at angle theta to the optic axis"""
    n_o = refractive_index(crystal.models["o"], wavelength_um)
    n_e = refractive_index(crystal.models["e"], wavelength_um)
    inv = np.cos(theta) ** 2 / n_o ** 2 + np.sin(theta) ** 2 / n_e ** 2
    return 1.0 / np.sqrt(inv)


def role_index(crystal: CrystalSpec, role: str, wavelength_um, theta: Optional[float] = None):
    """Index seen by the pump, signal or idler field"""
    if crystal.is_angle_dependent(role):
        if theta is None:
            raise PreconditionError(f"{crystal.name}: role '{role}' needs the cut angle theta")
        return angle_index(crystal, wavelength_um, theta)
    return refractive_index(crystal.models[crystal.roles.get(role)], wavelength_um)


def wavevector(crystal: CrystalSpec, role: str, omega, theta: Optional[float] = None):
    """
    Wavevector k = n(lambda) omega / c

    Args:
        crystal: Crystal spec
        role: "pump", "signal" or "idler"
        omega: Angular frequency in rad/s (scalar or array)
        theta: Cut angle in rad, required for extraordinary roles of angle-tuned crystals

    Returns:
        k in rad/m
    """
    omega = np.asarray(omega, dtype=float)
    k = role_index(crystal, role, omega_to_um(omega), theta) * omega / c
    return float(k) if np.ndim(k) == 0 else k


def inverse_group_velocity(crystal: CrystalSpec, role: str, omega, theta: Optional[float] = None):
    """dk/domega (s/m) by a central difference with relative step 1e-6"""
    omega = np.asarray(omega, dtype=float)
    h = GROUP_VELOCITY_STEP * omega
    k_plus = wavevector(crystal, role, omega + h, theta)
    k_minus = wavevector(crystal, role, omega - h, theta)
    return (k_plus - k_minus) / (2 * h)


def group_index(crystal: CrystalSpec, role: str, omega, theta: Optional[float] = None):
    """n_g = c k'"""
    return c * inverse_group_velocity(crystal, role, omega, theta)


def phase_mismatch_raw(crystal: CrystalSpec, omega_s, omega_i,
                       theta: Optional[float] = None, poling_k: float = 0.0):
    """k_p(omega_s + omega_i) - k_s(omega_s) - k_i(omega_i) - K0"""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    return (wavevector(crystal, "pump", omega_s + omega_i, theta)
            - wavevector(crystal, "signal", omega_s, theta)
            - wavevector(crystal, "idler", omega_i, theta)
            - poling_k)


def _check_energy(pump_nm: float, signal_nm: float, idler_nm: float) -> None:
    lhs = 1.0 / pump_nm
    rhs = 1.0 / signal_nm + 1.0 / idler_nm
    if abs(lhs - rhs) > 1e-9 * lhs:
        raise PreconditionError(
            f"energy conservation violated: 1/{pump_nm} != 1/{signal_nm} + 1/{idler_nm}"
        )


def solve_theta(crystal: CrystalSpec, omega_s: float, omega_i: float) -> float:
    """Cut angle in (0, pi/2) that zeroes the phase mismatch at the given pair"""

    def mismatch(theta: float) -> float:
        return float(phase_mismatch_raw(crystal, omega_s, omega_i, theta))

    lo, hi = THETA_MARGIN, np.pi / 2 - THETA_MARGIN
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if f_lo == 0.0:
        return lo
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoRootError(f"{crystal.name} phase matching in theta", (0.0, np.pi / 2))
    return bisect(mismatch, lo, hi, xtol=1e-15, maxiter=200)


def solve_pm_offset(crystal: CrystalSpec, pump_nm: float, signal_nm: float, idler_nm: float) -> float:
    """
    Phase-matching offset at the centre wavelengths

    Poled crystals: K0 = k_p - k_s - k_i (rad/m), i.e. the poling wavevector 2 pi / Lambda.
    Angle-tuned crystals: cut angle theta (rad) with Delta k = 0.

    Args:
        crystal: Crystal spec
        pump_nm, signal_nm, idler_nm: Centre wavelengths obeying energy conservation

    Returns:
        K0 in rad/m or theta in rad
    """
    _check_energy(pump_nm, signal_nm, idler_nm)
    omega_s = float(nm_to_omega(signal_nm))
    omega_i = float(nm_to_omega(idler_nm))

    if crystal.pm_type == "periodically_poled":
        return float(phase_mismatch_raw(crystal, omega_s, omega_i))
    return solve_theta(crystal, omega_s, omega_i)


def poling_period_um(poling_k: float) -> float:
    """Lambda = 2 pi / |K0| in um"""
    if poling_k == 0:
        return float("inf")
    return 2 * np.pi / abs(poling_k) * 1e6


def gvm_residual(crystal: CrystalSpec, center_nm: float) -> float:
    """
    Group-velocity matching residual (s/m) at a degenerate wavelength

    The pump sits at center_nm / 2; angle-tuned crystals are re-phase-matched
    at every wavelength before the group velocities are taken.
    """
    omega = float(nm_to_omega(center_nm))
    theta = None
    if crystal.pm_type == "birefringent_angle":
        theta = solve_theta(crystal, omega, omega)

    kp = inverse_group_velocity(crystal, "pump", 2 * omega, theta)
    if crystal.gvm_condition == "symmetric":
        ks = inverse_group_velocity(crystal, "signal", omega, theta)
        ki = inverse_group_velocity(crystal, "idler", omega, theta)
        return float(kp - 0.5 * (ks + ki))
    kx = inverse_group_velocity(crystal, crystal.gvm_photon, omega, theta)
    return float(kp - kx)


def _safe_residual(crystal: CrystalSpec, center_nm: float) -> float:
    try:
        return gvm_residual(crystal, center_nm)
    except (DispersionRangeError, NoRootError):
        return float("nan")


def find_gvm_center(crystal: CrystalSpec) -> float:
    """
    Degenerate signal/idler wavelength (nm) satisfying the crystal's GVM condition

    Scans the catalog wavelength window, keeps the sign change closest to the
    window centre and bisects it to 1e-3 nm.
    """
    lo, hi = crystal.grid.lambda_nm
    scan = np.linspace(lo, hi, GVM_SCAN_POINTS)
    values = np.array([_safe_residual(crystal, lam) for lam in scan])

    brackets = []
    for a, b, fa, fb in zip(scan[:-1], scan[1:], values[:-1], values[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and np.sign(fa) != np.sign(fb):
            brackets.append((a, b))
    if not brackets:
        raise NoRootError(f"{crystal.name} {crystal.gvm_condition} GVM condition", (lo, hi))

    middle = 0.5 * (lo + hi)
    a, b = min(brackets, key=lambda ab: abs(0.5 * (ab[0] + ab[1]) - middle))
    center = bisect(lambda lam: gvm_residual(crystal, lam), a, b, xtol=GVM_XTOL_NM)
    logger.debug(f"{crystal.name}: GVM centre {center:.3f} nm (bracket {a:.1f}-{b:.1f} nm)")
    return float(center)
