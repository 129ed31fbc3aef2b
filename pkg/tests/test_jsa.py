"""
Tests for JSA assembly and herald filtering
"""

import numpy as np
import pytest
from scipy.constants import c

from spdcopt.config import settings
from spdcopt.errors import ConfigurationError, ResourceGuardError, UnsupportedConfigurationError
from spdcopt.models.source import FilterSpec, JointAmplitude, PumpSpec, SourceConfig
from spdcopt.services.dispersion import inverse_group_velocity, solve_pm_offset
from spdcopt.services.jsa import (
    APODIZATION_GAMMA,
    apply_herald_filter,
    assemble_jsa,
    filter_transmission,
    joint_intensity,
    make_grid,
    marginal_spectra,
    phase_matching,
    pump_envelope,
    pump_sigma,
)
from spdcopt.services.metrics import schmidt_purity
from spdcopt.utils.units import bandwidth_nm_to_omega, nm_to_omega


def test_phase_matching_sinc():
    assert phase_matching(0.0, 10.0, "sinc") == pytest.approx(1.0)
    # Delta k L / 2 = pi is the first zero
    assert abs(phase_matching(2 * np.pi / 1e-3, 1.0, "sinc")) < 1e-12


def test_phase_matching_gaussian():
    delta_k = 2.0 / 1e-3
    assert phase_matching(delta_k, 1.0, "gaussian_apodized") == pytest.approx(np.exp(-APODIZATION_GAMMA))


def test_phase_matching_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        phase_matching(0.0, 0.0)
    with pytest.raises(ConfigurationError):
        phase_matching(0.0, 1.0, "lorentzian")


def test_pump_envelope_half_maximum():
    pump = PumpSpec(center_nm=415.0, fwhm_nm=2.0)
    omega_p = nm_to_omega(415.0)
    half = bandwidth_nm_to_omega(2.0, 415.0) / 2
    assert pump_envelope(omega_p / 2, omega_p / 2, pump) == pytest.approx(1.0)
    assert pump_envelope(omega_p / 2 + half, omega_p / 2, pump) == pytest.approx(0.5, rel=1e-12)
    assert pump_sigma(pump) > 0


def test_make_grid_validation():
    grid = make_grid(800.0, 860.0, 7)
    assert grid.wavelengths_nm[0] == 800.0 and grid.wavelengths_nm[-1] == 860.0
    with pytest.raises(ConfigurationError):
        make_grid(860.0, 800.0, 7)
    with pytest.raises(ConfigurationError):
        make_grid(800.0, 860.0, 1)


def test_vacuum_jsa_is_pump_envelope(vacuum_config, small_grid):
    jsa = assemble_jsa(vacuum_config, small_grid)
    omega = small_grid.omega
    expected = pump_envelope(omega[:, None], omega[None, :], vacuum_config.pump)
    assert jsa.shape == (32, 32)
    np.testing.assert_allclose(jsa.values, expected, rtol=1e-12, atol=1e-15)


def test_jsa_is_read_only(vacuum_config, small_grid):
    jsa = assemble_jsa(vacuum_config, small_grid)
    with pytest.raises(ValueError):
        jsa.values[0, 0] = 1.0


def test_block_and_thread_layout_do_not_change_result(ktp_config, ktp_grid):
    reference = assemble_jsa(ktp_config, ktp_grid)
    blocked = assemble_jsa(ktp_config, ktp_grid, block_rows=7, workers=3)
    np.testing.assert_allclose(reference.values, blocked.values, rtol=1e-13, atol=1e-15)


def test_jsa_peak_at_degenerate_point(ktp_config, ktp_grid):
    jsa = assemble_jsa(ktp_config, ktp_grid)
    assert np.all(np.isfinite(jsa.values))
    row, col = np.unravel_index(np.argmax(np.abs(jsa.values)), jsa.shape)
    assert abs(row - col) <= 2
    assert abs(row - jsa.shape[0] // 2) <= 3


def test_memory_guard(monkeypatch, vacuum_config):
    monkeypatch.setattr(settings, "MEMORY_CAP_MB", 1)
    with pytest.raises(ResourceGuardError, match="memory cap"):
        assemble_jsa(vacuum_config, make_grid(780.0, 880.0, 400))


def test_filter_transmission_gaussian_half_width():
    spec = FilterSpec.of("gaussian", 6.0, 830.0)
    assert filter_transmission(spec, nm_to_omega(830.0)) == pytest.approx(1.0)
    assert filter_transmission(spec, nm_to_omega(833.0)) == pytest.approx(0.5, rel=1e-9)


def test_filter_transmission_intensity_convention():
    spec = FilterSpec.of("gaussian", 6.0, 830.0, convention="intensity")
    assert filter_transmission(spec, nm_to_omega(833.0)) ** 2 == pytest.approx(0.5, rel=1e-9)


def test_filter_transmission_rectangular():
    spec = FilterSpec.of("rectangular", 10.0, 830.0)
    assert filter_transmission(spec, nm_to_omega(834.9)) == 1.0
    assert filter_transmission(spec, nm_to_omega(836.0)) == 0.0


def test_filter_none_passes_everything(small_grid):
    t = filter_transmission(FilterSpec(), small_grid.omega)
    np.testing.assert_array_equal(t, np.ones(32))


def test_filter_only_on_herald(vacuum_config, small_grid):
    jsa = assemble_jsa(vacuum_config, small_grid)
    spec = FilterSpec(shape="gaussian", fwhm_nm=5.0, center_nm=830.0, target="signal")
    with pytest.raises(UnsupportedConfigurationError):
        apply_herald_filter(jsa, spec)


def test_herald_filter_scales_columns(vacuum_config, small_grid):
    jsa = assemble_jsa(vacuum_config, small_grid)
    spec = FilterSpec.of("gaussian", 20.0, 830.0)
    filtered = apply_herald_filter(jsa, spec)
    t = filter_transmission(spec, small_grid.omega)
    np.testing.assert_allclose(filtered.values, jsa.values * t[None, :])
    assert apply_herald_filter(jsa, FilterSpec()) is jsa


def test_joint_intensity_and_marginals(vacuum_config, small_grid):
    jsa = assemble_jsa(vacuum_config, small_grid)
    np.testing.assert_allclose(joint_intensity(jsa), jsa.values ** 2)
    signal, idler = marginal_spectra(jsa)
    assert signal.sum() == pytest.approx(1.0)
    assert idler.sum() == pytest.approx(1.0)
    # the vacuum JSA depends on omega_s + omega_i only
    np.testing.assert_allclose(signal, idler, rtol=1e-10)


def test_marginals_of_zero_jsa(small_grid):
    jsa = JointAmplitude.from_grid(np.zeros((32, 32)), small_grid)
    signal, idler = marginal_spectra(jsa)
    assert not signal.any() and not idler.any()


def _matched_apodized_config(ktp, center, length_mm, scale=1.0):
    """apKTP with the pump width that makes the JSA separable"""
    omega = nm_to_omega(center)
    slope = inverse_group_velocity(ktp, "pump", 2 * omega) - inverse_group_velocity(ktp, "signal", omega)
    sigma = 1.0 / (np.sqrt(APODIZATION_GAMMA) * abs(slope) * length_mm * 1e-3)
    fwhm_omega = 4 * np.sqrt(np.log(2.0)) * sigma
    pump_nm = center / 2
    fwhm_nm = fwhm_omega * (pump_nm * 1e-9) ** 2 / (2 * np.pi * c) * 1e9
    return SourceConfig(
        crystal=ktp,
        pump=PumpSpec(center_nm=pump_nm, fwhm_nm=fwhm_nm * scale),
        length_mm=length_mm,
        pm_offset=solve_pm_offset(ktp, pump_nm, center, center),
        pm_shape="gaussian_apodized",
    )


def test_apodized_ktp_is_nearly_separable(ktp, ktp_center):
    grid = make_grid(ktp_center - 25.0, ktp_center + 25.0, 201)
    apodized = _matched_apodized_config(ktp, ktp_center, 10.0)
    sinc = apodized.model_copy(update={"pm_shape": "sinc"})
    p_apodized = schmidt_purity(assemble_jsa(apodized, grid)).P
    p_sinc = schmidt_purity(assemble_jsa(sinc, grid)).P
    assert p_apodized > 0.98
    assert p_sinc < 0.95


@pytest.mark.parametrize("factor", [0.5, 2.0])
def test_apodized_purity_invariant_under_length_bandwidth_scaling(ktp, ktp_center, factor):
    grid = make_grid(ktp_center - 25.0, ktp_center + 25.0, 201)
    base = _matched_apodized_config(ktp, ktp_center, 10.0)
    scaled = _matched_apodized_config(ktp, ktp_center, 10.0 * factor)
    p_base = schmidt_purity(assemble_jsa(base, grid)).P
    p_scaled = schmidt_purity(assemble_jsa(scaled, grid)).P
    assert p_scaled == pytest.approx(p_base, abs=2e-3)


@pytest.mark.parametrize("pm_shape", ["sinc", "gaussian_apodized"])
def test_jsa_sign_structure_on_wide_grid(ktp, ktp_center, pm_shape):
    config = SourceConfig(
        crystal=ktp,
        pump=PumpSpec(center_nm=ktp_center / 2, fwhm_nm=30.0),
        length_mm=2.0,
        pm_offset=solve_pm_offset(ktp, ktp_center / 2, ktp_center, ktp_center),
        pm_shape=pm_shape,
    )
    lo, hi = ktp.grid.lambda_nm
    values = assemble_jsa(config, make_grid(lo, hi, 256)).values
    if pm_shape == "sinc":
        # side lobes of the sinc are negative
        assert values.min() < -0.1 * values.max()
    else:
        assert values.min() >= 0.0
