"""
Tests for result files and result models
"""

import numpy as np
import orjson
import pytest
from pydantic import ValidationError

from spdcopt.models.results import (
    ConvergencePoint,
    OptimalPoint,
    SourceMetrics,
    SweepResult,
    SweepRow,
    TableRow,
)
from spdcopt.models.source import JointAmplitude
from spdcopt.utils.io import (
    TABLE_COLUMNS,
    format_value,
    parse_value,
    read_jsa_dump,
    read_rows,
    write_convergence_csv,
    write_jsa_dump,
    write_sweep_csv,
    write_table_csv,
)


def _point(alpha):
    metrics = SourceMetrics(purity=alpha, transmission=1.0, alpha=alpha, k_max=3, purity_unfiltered=0.5)
    return OptimalPoint(length_mm=10.0, pump_fwhm_nm=2.0, metrics=metrics)


def test_format_value():
    assert format_value(0.123456789) == "0.123457"
    assert format_value(1582.04321) == "1582.04"
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(np.int64(7)) == "7"


def test_parse_value():
    assert parse_value("7") == 7
    assert parse_value("0.5") == 0.5
    assert parse_value("false") is False
    assert parse_value("") is None
    assert parse_value("ppKTP") == "ppKTP"


def test_sweep_csv(tmp_path):
    result = SweepResult(
        crystal="ktp", pm_shape="sinc", filter_shape="gaussian",
        rows=[SweepRow(filter_fwhm_nm=w, point=_point(a), k_max=3) for w, a in [(6.0, 0.8), (80.0, 0.9)]],
        best_row=1,
    )
    path = write_sweep_csv(tmp_path / "sweep.csv", result)
    rows = read_rows(path)
    assert [row["alpha"] for row in rows] == [0.8, 0.9]
    assert rows[1]["eta"] == 1
    assert rows[0]["converged"] is True
    assert rows[0]["purity_unfiltered"] == 0.5


def test_table_csv_keeps_infeasible_rows(tmp_path):
    row = TableRow(
        crystal="BBO", pm_shape="sinc", filter_shape="rectangular", alpha_opt=0.85, eta_tb=None,
        lambda_c_nm=1514.0, length_mm=12.0, pump_fwhm_nm=3.0, filter_fwhm_nm=130.0, k_max=40,
        feasible=False, filter_break_even=0.97,
    )
    path = write_table_csv(tmp_path / "table.csv", [row])
    (parsed,) = read_rows(path)
    assert list(parsed) == TABLE_COLUMNS
    assert parsed["eta_tb"] is None
    assert parsed["feasible"] is False


def test_convergence_csv(tmp_path):
    points = [ConvergencePoint(points=250, alpha=0.91, deviation=1e-3), ConvergencePoint(points=500, alpha=0.9105, deviation=5e-4)]
    rows = read_rows(write_convergence_csv(tmp_path / "conv.csv", points))
    assert [row["N"] for row in rows] == [250, 500]
    assert rows[1]["delta_alpha"] == 5e-4


def test_jsa_dump_switches_to_npy(tmp_path, small_grid):
    grid = small_grid.with_points(600)
    values = np.outer(np.linspace(0, 1, 600), np.linspace(1, 2, 600))
    path = write_jsa_dump(tmp_path / "big", JointAmplitude.from_grid(values, grid))
    assert path.suffix == ".npy"
    loaded = read_jsa_dump(path)
    np.testing.assert_array_equal(loaded.values, values)


def test_jsi_dump(tmp_path, small_grid):
    values = np.full((32, 32), 0.5)
    path = write_jsa_dump(tmp_path / "jsi", JointAmplitude.from_grid(values, small_grid), intensity=True)
    np.testing.assert_allclose(read_jsa_dump(path).values, 0.25)


def test_source_metrics_ranges():
    with pytest.raises(ValidationError):
        SourceMetrics(purity=0.5, transmission=0.9, alpha=0.6, k_max=1)
    with pytest.raises(ValidationError):
        SourceMetrics(purity=1.2, transmission=0.9, alpha=0.6, k_max=1)


def test_sweep_result_requires_sorted_rows():
    rows = [SweepRow(filter_fwhm_nm=w, point=_point(0.8), k_max=3) for w in (80.0, 6.0)]
    with pytest.raises(ValidationError, match="sorted"):
        SweepResult(crystal="ktp", pm_shape="sinc", filter_shape="gaussian", rows=rows)


def test_sweep_result_best_row_must_be_max():
    rows = [SweepRow(filter_fwhm_nm=w, point=_point(a), k_max=3) for w, a in [(6.0, 0.8), (80.0, 0.9)]]
    with pytest.raises(ValidationError, match="maximum"):
        SweepResult(crystal="ktp", pm_shape="sinc", filter_shape="gaussian", rows=rows, best_row=0)


def test_joint_amplitude_rejects_bad_shapes(small_grid):
    with pytest.raises(ValidationError):
        JointAmplitude(values=np.ones((3, 4)), signal_omega=small_grid.omega, idler_omega=small_grid.omega)
    with pytest.raises(ValidationError):
        JointAmplitude.from_grid(np.full((32, 32), np.nan), small_grid)


def test_joint_amplitude_leaves_caller_arrays_writable(small_grid):
    values = np.ones((32, 32))
    omega = small_grid.omega.copy()
    jsa = JointAmplitude(values=values, signal_omega=omega, idler_omega=omega)
    assert values.flags.writeable and omega.flags.writeable
    assert not jsa.values.flags.writeable
    values[0, 0] = 5.0
    assert jsa.values[0, 0] == 1.0


def test_joint_amplitude_casts_integer_values(small_grid):
    jsa = JointAmplitude.from_grid(np.ones((32, 32), dtype=int), small_grid)
    assert jsa.values.dtype == np.float64


def test_jsa_dump_sidecar_carries_marginals(tmp_path, small_grid):
    values = np.outer(np.linspace(1.0, 2.0, 32), np.ones(32))
    jsa = JointAmplitude.from_grid(values, small_grid)
    marginals = (np.full(32, 1 / 32), np.linspace(0.0, 1.0, 32))
    write_jsa_dump(tmp_path / "m", jsa, marginals=marginals)
    sidecar = orjson.loads((tmp_path / "m.json").read_bytes())
    assert len(sidecar["marginal_signal"]) == 32
    assert sidecar["marginal_idler"][-1] == 1.0
    plain = write_jsa_dump(tmp_path / "n", jsa).with_suffix(".json")
    assert "marginal_signal" not in orjson.loads(plain.read_bytes())
