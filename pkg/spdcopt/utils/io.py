"""
Result File I/O
CSV writers/readers with fixed 6-significant-digit formatting and JSA dumps
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import orjson

from spdcopt.config import settings
from spdcopt.models.results import ConvergencePoint, SweepResult, TableRow
from spdcopt.models.source import JointAmplitude
from spdcopt.utils.units import nm_to_omega

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "filter_fwhm_nm", "L_mm", "pump_fwhm_nm", "eta", "x2", "alpha",
    "k_max", "purity_unfiltered", "converged",
]
TABLE_COLUMNS = [
    "crystal", "pm_shape", "filter_shape", "alpha_opt", "eta_tb", "lambda_c_nm",
    "L_mm", "pump_fwhm_nm", "filter_fwhm_nm", "k_max", "feasible", "filter_break_even",
]
CONVERGENCE_COLUMNS = ["N", "alpha", "delta_alpha"]

# Larger dumps go to .npy instead of CSV
CSV_DUMP_MAX_POINTS = 512


def format_value(value: Any) -> str:
    """Render one cell: floats at FLOAT_DIGITS significant digits, None empty"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{settings.FLOAT_DIGITS}g}"
    return str(value)


def parse_value(text: str) -> Any:
    """Inverse of format_value for the cells this package writes"""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def write_rows(path: Path, columns: Sequence[str], rows: List[Dict[str, Any]]) -> Path:
    """Write dict rows as CSV (header always present)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_value(row.get(key)) for key in columns})
    logger.info(f"✅ Wrote {len(rows)} rows to {path}")
    return path


def read_rows(path: Path) -> List[Dict[str, Any]]:
    """Read a CSV written by write_rows back into typed dicts"""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        return [{key: parse_value(value) for key, value in row.items()} for row in csv.DictReader(fh)]


def sweep_rows(result: SweepResult) -> List[Dict[str, Any]]:
    rows = []
    for row in result.rows:
        metrics = row.point.metrics
        rows.append({
            "filter_fwhm_nm": row.filter_fwhm_nm,
            "L_mm": row.point.length_mm,
            "pump_fwhm_nm": row.point.pump_fwhm_nm,
            "eta": metrics.transmission,
            "x2": metrics.indistinguishability,
            "alpha": metrics.alpha,
            "k_max": row.k_max,
            "purity_unfiltered": metrics.purity_unfiltered,
            "converged": row.point.converged,
        })
    return rows


def write_sweep_csv(path: Path, result: SweepResult) -> Path:
    return write_rows(path, SWEEP_COLUMNS, sweep_rows(result))


def write_table_csv(path: Path, rows: List[TableRow]) -> Path:
    return write_rows(path, TABLE_COLUMNS, [
        {
            "crystal": r.crystal,
            "pm_shape": r.pm_shape,
            "filter_shape": r.filter_shape,
            "alpha_opt": r.alpha_opt,
            "eta_tb": r.eta_tb,
            "lambda_c_nm": r.lambda_c_nm,
            "L_mm": r.length_mm,
            "pump_fwhm_nm": r.pump_fwhm_nm,
            "filter_fwhm_nm": r.filter_fwhm_nm,
            "k_max": r.k_max,
            "feasible": r.feasible,
            "filter_break_even": r.filter_break_even,
        }
        for r in rows
    ])


def write_convergence_csv(path: Path, points: List[ConvergencePoint]) -> Path:
    return write_rows(path, CONVERGENCE_COLUMNS, [
        {"N": p.points, "alpha": p.alpha, "delta_alpha": p.deviation} for p in points
    ])


def write_jsa_dump(path: Path, jsa: JointAmplitude, intensity: bool = False,
                   marginals: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> Path:
    """
    Dump a JSA (or JSI) matrix plus a JSON sidecar with the wavelength axes

    Args:
        path: Target path without suffix; ".csv" or ".npy" is appended
        jsa: Amplitude to dump (rows signal, columns idler)
        intensity: Dump |JSA|^2 instead of the amplitude
        marginals: Optional (signal, idler) marginal spectra stored in the sidecar

    Returns:
        Path of the matrix file
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix = jsa.values ** 2 if intensity else jsa.values
    use_csv = max(jsa.shape) <= CSV_DUMP_MAX_POINTS

    if use_csv:
        target = path.with_suffix(".csv")
        np.savetxt(target, matrix, delimiter=",", fmt=f"%.{settings.FLOAT_DIGITS}g")
    else:
        target = path.with_suffix(".npy")
        np.save(target, matrix)

    sidecar = {
        "lambda_s_nm": [float(format_value(v)) for v in jsa.signal_nm],
        "lambda_i_nm": [float(format_value(v)) for v in jsa.idler_nm],
        "shape": list(jsa.shape),
        "format": "csv" if use_csv else "npy",
        "quantity": "jsi" if intensity else "jsa",
    }
    if marginals is not None:
        sidecar["marginal_signal"] = [float(format_value(v)) for v in marginals[0]]
        sidecar["marginal_idler"] = [float(format_value(v)) for v in marginals[1]]
    path.with_suffix(".json").write_bytes(orjson.dumps(sidecar, option=orjson.OPT_INDENT_2))
    logger.info(f"✅ Wrote {jsa.shape[0]}x{jsa.shape[1]} {sidecar['quantity'].upper()} to {target}")
    return target


def read_jsa_dump(path: Path) -> JointAmplitude:
    """Load a dump written by write_jsa_dump (path with or without suffix)"""
    base = Path(path).with_suffix("")
    sidecar = orjson.loads(base.with_suffix(".json").read_bytes())
    if sidecar["format"] == "csv":
        matrix = np.loadtxt(base.with_suffix(".csv"), delimiter=",", ndmin=2)
    else:
        matrix = np.load(base.with_suffix(".npy"))
    return JointAmplitude(
        values=matrix,
        signal_omega=nm_to_omega(sidecar["lambda_s_nm"]),
        idler_omega=nm_to_omega(sidecar["lambda_i_nm"]),
    )


def output_path(output_dir: Optional[str], name: str) -> Path:
    """File inside the run's output directory"""
    return Path(output_dir or settings.OUTPUT_DIR) / name
