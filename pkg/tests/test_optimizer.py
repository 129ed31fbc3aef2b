"""
Tests for the optimizer service
"""

import numpy as np
import pytest

from spdcopt.config import settings
from spdcopt.errors import ConfigurationError, NonFiniteObjectiveError, ResourceGuardError
from spdcopt.models.results import SourceMetrics
from spdcopt.models.source import FilterSpec, PumpSpec, SourceConfig
from spdcopt.services.jsa import assemble_jsa, make_grid, marginal_spectra
from spdcopt.services.optimizer import (
    build_problem,
    convergence_study,
    default_bandwidths,
    evaluate_source,
    maximize_alpha,
    sweep_filter_bandwidths,
)


def paraboloid(peak_length, peak_fwhm, top=0.9):
    """Concave stub objective in box-normalized units of the vacuum crystal"""

    def objective(length_mm, pump_fwhm_nm):
        du = (length_mm - peak_length) / 29.5
        dv = (pump_fwhm_nm - peak_fwhm) / 29.9
        alpha = max(top - 0.1 * (du ** 2 + dv ** 2), 0.0)
        return SourceMetrics(purity=alpha, transmission=1.0, alpha=alpha, k_max=0)

    return objective


@pytest.fixture
def tight_tolerances(monkeypatch):
    monkeypatch.setattr(settings, "OPTIMIZER_FTOL", 1e-15)
    monkeypatch.setattr(settings, "OPTIMIZER_GTOL", 1e-10)


@pytest.fixture
def stub_problem(vacuum_crystal, small_grid):
    return build_problem(vacuum_crystal, "sinc", FilterSpec(), grid=small_grid, center_nm=830.0)


def test_build_problem_defaults(vacuum_crystal):
    problem = build_problem(vacuum_crystal, "sinc", FilterSpec.of("gaussian", 6.0), center_nm=830.0)
    assert problem.start == (15.25, 15.05)
    assert problem.pump_center_nm == 415.0
    assert problem.filter.center_nm == 830.0
    assert problem.grid.points == 32
    assert problem.error_bound == 0.1


def test_evaluate_without_filter(vacuum_config, small_grid):
    metrics = evaluate_source(vacuum_config, FilterSpec(), small_grid)
    assert metrics.transmission == 1.0
    assert metrics.alpha == pytest.approx(metrics.purity_unfiltered)
    assert metrics.purity == metrics.purity_unfiltered


def test_evaluate_with_all_pass_rectangle(vacuum_config, small_grid):
    metrics = evaluate_source(vacuum_config, FilterSpec.of("rectangular", 500.0, 830.0), small_grid)
    assert metrics.transmission == pytest.approx(1.0, abs=1e-15)
    assert metrics.purity == pytest.approx(metrics.purity_unfiltered, abs=1e-12)


def test_filtering_raises_purity_and_costs_transmission(vacuum_config, small_grid):
    metrics = evaluate_source(vacuum_config, FilterSpec.of("gaussian", 5.0), small_grid)
    assert metrics.transmission < 1.0
    assert metrics.purity > metrics.purity_unfiltered
    assert metrics.alpha == pytest.approx(metrics.transmission * metrics.purity)


def test_maximize_interior_peak(stub_problem, tight_tolerances):
    point = maximize_alpha(stub_problem, paraboloid(10.0, 5.0))
    assert abs(point.length_mm - 10.0) / 29.5 < 1e-4
    assert abs(point.pump_fwhm_nm - 5.0) / 29.9 < 1e-4
    assert point.alpha == pytest.approx(0.9, abs=1e-8)
    assert point.alpha >= point.start_alpha
    assert point.evaluations > 0


def test_maximize_peak_outside_box(stub_problem, tight_tolerances):
    point = maximize_alpha(stub_problem, paraboloid(40.0, 5.0))
    assert point.length_mm == 30.0
    assert abs(point.pump_fwhm_nm - 5.0) / 29.9 < 1e-4


def test_maximize_is_stationary(stub_problem, tight_tolerances):
    first = maximize_alpha(stub_problem, paraboloid(12.0, 8.0))
    restarted = maximize_alpha(
        stub_problem.model_copy(update={"start": (first.length_mm, first.pump_fwhm_nm)}),
        paraboloid(12.0, 8.0),
    )
    assert abs(restarted.alpha - first.alpha) < 1e-6


def test_maximize_rejects_non_finite(stub_problem):
    def broken(length_mm, pump_fwhm_nm):
        return SourceMetrics.model_construct(purity=1.0, transmission=1.0, alpha=float("nan"), k_max=0)

    with pytest.raises(NonFiniteObjectiveError, match="L="):
        maximize_alpha(stub_problem, broken)


def test_maximize_real_pipeline_stays_in_bounds(stub_problem):
    point = maximize_alpha(stub_problem)
    bounds = stub_problem.bounds
    assert bounds.contains(point.length_mm, point.pump_fwhm_nm)
    assert point.alpha >= point.start_alpha


def stub_factory(problem):
    """alpha peaks at an 80 nm filter"""
    width = problem.filter.bandwidth_nm
    top = 0.9 - 0.01 * np.log(width / 80.0) ** 2
    return paraboloid(10.0, 5.0, top=top)


def test_sweep_picks_best_bandwidth(vacuum_crystal, small_grid):
    result = sweep_filter_bandwidths(
        vacuum_crystal, "sinc", "gaussian", [20.0, 40.0, 80.0, 160.0],
        grid=small_grid, center_nm=830.0, objective_factory=stub_factory,
    )
    assert [row.filter_fwhm_nm for row in result.rows] == [20.0, 40.0, 80.0, 160.0]
    assert result.best.filter_fwhm_nm == 80.0
    assert result.crystal == "vacuum"


def test_sweep_parallel_matches_sequential(vacuum_crystal, small_grid):
    kwargs = dict(grid=small_grid, center_nm=830.0, objective_factory=stub_factory, warm_start=False)
    sequential = sweep_filter_bandwidths(vacuum_crystal, "sinc", "gaussian", [20.0, 80.0, 160.0], **kwargs)
    parallel = sweep_filter_bandwidths(
        vacuum_crystal, "sinc", "gaussian", [20.0, 80.0, 160.0], workers=3, **kwargs,
    )
    assert [r.point.alpha for r in sequential.rows] == [r.point.alpha for r in parallel.rows]


def test_sweep_requires_increasing_bandwidths(vacuum_crystal, small_grid):
    with pytest.raises(ConfigurationError, match="increasing"):
        sweep_filter_bandwidths(vacuum_crystal, "sinc", "gaussian", [40.0, 20.0], grid=small_grid, center_nm=830.0)
    with pytest.raises(ConfigurationError):
        sweep_filter_bandwidths(vacuum_crystal, "sinc", "gaussian", [], grid=small_grid, center_nm=830.0)


def test_sweep_all_pass_rectangle_is_unfiltered(vacuum_crystal, small_grid):
    result = sweep_filter_bandwidths(
        vacuum_crystal, "sinc", "rectangular", [500.0], grid=small_grid, center_nm=830.0,
    )
    metrics = result.rows[0].point.metrics
    assert metrics.transmission == pytest.approx(1.0, abs=1e-15)
    assert metrics.alpha == pytest.approx(metrics.purity_unfiltered, abs=1e-12)


def test_default_bandwidths():
    values = default_bandwidths()
    assert len(values) == settings.SWEEP_POINTS
    assert values[0] == 1.0 and values[-1] == 200.0
    assert all(b > a for a, b in zip(values, values[1:]))


def test_convergence_self_comparison(vacuum_config, small_grid):
    points = convergence_study(vacuum_config, FilterSpec(), [32], 32, grid=small_grid)
    assert points[0].deviation == 0.0


def test_convergence_reference_must_be_largest(vacuum_config, small_grid):
    with pytest.raises(ConfigurationError):
        convergence_study(vacuum_config, FilterSpec(), [64], 32, grid=small_grid)


def test_convergence_memory_guard(vacuum_config, small_grid):
    with pytest.raises(ResourceGuardError):
        convergence_study(vacuum_config, FilterSpec(), [100], 1000, grid=small_grid, memory_cap_mb=1)


def test_convergence_deviation_shrinks(ktp_config, ktp_grid):
    spec = FilterSpec.of("gaussian", 20.0, 2 * ktp_config.pump.center_nm)
    points = convergence_study(ktp_config, spec, [16, 64], 256, grid=ktp_grid)
    assert points[1].deviation < points[0].deviation


@pytest.fixture
def kdp_table_point(kdp):
    """KDP at the published optimum: 25 mm crystal, 2.3 nm pump, 6 nm Gaussian herald filter"""
    problem = build_problem(kdp, "sinc", FilterSpec.of("gaussian", 6.0), grid=make_grid(780.0, 880.0, 500))
    config = SourceConfig(
        crystal=kdp,
        pump=PumpSpec(center_nm=problem.pump_center_nm, fwhm_nm=2.3),
        length_mm=25.0,
        pm_offset=problem.pm_offset,
    )
    return config, problem


def test_kdp_herald_is_the_narrowband_photon(kdp_table_point):
    config, problem = kdp_table_point
    signal, idler = marginal_spectra(assemble_jsa(config, problem.grid))
    wavelengths = problem.grid.wavelengths_nm

    def spread(weights):
        mean = np.sum(weights * wavelengths)
        return np.sqrt(np.sum(weights * (wavelengths - mean) ** 2))

    assert spread(idler) < spread(signal)


def test_kdp_table_point_keeps_most_heralds(kdp_table_point):
    config, problem = kdp_table_point
    metrics = evaluate_source(config, problem.filter, problem.grid)
    assert metrics.transmission > 0.9
    assert metrics.alpha > 0.9


def test_fidelity_transmission_never_below_norm_ratio(monkeypatch, ktp_config, ktp_grid):
    spec = FilterSpec.of("gaussian", 3.0)
    ratio = evaluate_source(ktp_config, spec, ktp_grid)
    monkeypatch.setattr(settings, "TRANSMISSION_METHOD", "fidelity")
    fidelity = evaluate_source(ktp_config, spec, ktp_grid)
    assert fidelity.transmission > ratio.transmission
    assert fidelity.purity == pytest.approx(ratio.purity, rel=1e-12)
