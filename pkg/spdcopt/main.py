"""
spdcopt - Command-line entry point
Subcommands: gvm, jsa, optimize, sweep, table, converge
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import orjson
from pydantic import ValidationError

from spdcopt import __version__
from spdcopt.config import settings
from spdcopt.errors import ConfigurationError, ResourceGuardError, SpdcError
from spdcopt.models.run import RunConfig
from spdcopt.services.dispersion import (
    find_gvm_center,
    group_index,
    gvm_residual,
    poling_period_um,
    solve_pm_offset,
)
from spdcopt.services.metrics import hom_visibility
from spdcopt.tasks import run_convergence, run_jsa_dump, run_optimize, run_sweep, run_table
from spdcopt.utils.catalog import Catalog
from spdcopt.utils.io import format_value
from spdcopt.utils.logger import setup_logging
from spdcopt.utils.units import nm_to_omega

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3

PM_CHOICES = {"sinc": "sinc", "apodized": "gaussian_apodized"}
FILTER_CHOICES = {"none": "none", "gaussian": "gaussian", "rect": "rectangular"}


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one sub-parser per command"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("crystal_pos", nargs="?", metavar="CRYSTAL", help="Catalog crystal (ktp, bbo, kdp)")
    common.add_argument("--crystal", help="Catalog crystal (same as the positional argument)")
    common.add_argument("--pm", choices=sorted(PM_CHOICES), help="Phase-matching shape")
    common.add_argument("--filter", dest="filter_shape", choices=sorted(FILTER_CHOICES),
                        help="Herald filter shape")
    common.add_argument("--fwhm-nm", type=float, help="Filter bandwidth (FWHM or full width) in nm")
    common.add_argument("--grid-n", type=int, help="Grid points per axis")
    common.add_argument("--lambda-nm", type=float, nargs=2, metavar=("MIN", "MAX"),
                        help="Grid wavelength span in nm")
    common.add_argument("--error-bound", type=float, help="Classical simulation error bound E (default 0.1)")
    common.add_argument("--target-k", type=int, help="Target photon number (default 50)")
    common.add_argument("--out", dest="output_dir", help="Output directory")
    common.add_argument("--config", type=Path, help="JSON run configuration; flags win")
    common.add_argument("--log-level", help="Logging level")

    parser = argparse.ArgumentParser(prog="spdcopt", description="SPDC source-quality optimizer")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("gvm", parents=[common], help="Group-velocity matched wavelength")

    jsa = sub.add_parser("jsa", parents=[common], help="Dump the JSA of one operating point")
    jsa.add_argument("--n", dest="grid_n_alias", type=int, help="Grid points per axis")
    jsa.add_argument("--no-filter", action="store_true", help="Dump the unfiltered JSA")
    jsa.add_argument("--pair", action="store_true", default=None, help="Also dump the unfiltered JSA")
    jsa.add_argument("--length-mm", type=float, help="Crystal length in mm")
    jsa.add_argument("--pump-fwhm-nm", type=float, help="Pump bandwidth in nm")
    jsa.add_argument("--jsi", action="store_true", help="Dump |JSA|^2")

    sub.add_parser("optimize", parents=[common], help="Maximize alpha for one filter")

    for name, text in (("sweep", "Optimum per filter bandwidth"), ("table", "Table over the whole catalog")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--bandwidths", type=_float_list, help="Comma-separated filter bandwidths in nm")
        cmd.add_argument("--no-warm-start", action="store_true", help="Optimize every row from the box midpoint")
        cmd.add_argument("--workers", type=int, help="Threads for independent rows")

    converge = sub.add_parser("converge", parents=[common], help="Grid convergence study")
    converge.add_argument("--n", dest="resolutions", type=_int_list, help="Comma-separated resolutions")
    converge.add_argument("--ref", dest="reference_n", type=int, help="Reference resolution")
    converge.add_argument("--length-mm", type=float, help="Crystal length in mm")
    converge.add_argument("--pump-fwhm-nm", type=float, help="Pump bandwidth in nm")

    return parser


def _load_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        data = orjson.loads(Path(path).read_bytes())
    except (OSError, orjson.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return data


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge the JSON config file with command-line flags (flags win)"""
    values = _load_config_file(getattr(args, "config", None))
    if values.get("pm_shape") in PM_CHOICES:
        values["pm_shape"] = PM_CHOICES[values["pm_shape"]]
    if values.get("filter_shape") in FILTER_CHOICES:
        values["filter_shape"] = FILTER_CHOICES[values["filter_shape"]]

    flags = {
        "crystal": args.crystal or args.crystal_pos,
        "pm_shape": PM_CHOICES.get(args.pm) if args.pm else None,
        "filter_shape": FILTER_CHOICES.get(args.filter_shape) if args.filter_shape else None,
        "fwhm_nm": args.fwhm_nm,
        "grid_n": getattr(args, "grid_n_alias", None) or args.grid_n,
        "lambda_nm": tuple(args.lambda_nm) if args.lambda_nm else None,
        "error_bound": args.error_bound,
        "target_k": args.target_k,
        "output_dir": args.output_dir,
        "bandwidths": getattr(args, "bandwidths", None),
        "workers": getattr(args, "workers", None),
        "resolutions": getattr(args, "resolutions", None),
        "reference_n": getattr(args, "reference_n", None),
        "pair": getattr(args, "pair", None),
        "length_mm": getattr(args, "length_mm", None),
        "pump_fwhm_nm": getattr(args, "pump_fwhm_nm", None),
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    if getattr(args, "no_warm_start", False):
        values["warm_start"] = False
    if getattr(args, "no_filter", False):
        values["filter_shape"] = "none"

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigurationError(f"invalid run configuration: {e}") from e


def cmd_gvm(run: RunConfig) -> int:
    """Print the degenerate wavelength, pump wavelength and GVM residual"""
    if not run.crystal:
        raise ConfigurationError("no crystal given")
    crystal = Catalog.get(run.crystal)
    center_nm = find_gvm_center(crystal)
    offset = solve_pm_offset(crystal, center_nm / 2, center_nm, center_nm)
    theta = offset if crystal.pm_type == "birefringent_angle" else None
    omega = float(nm_to_omega(center_nm))

    print(f"crystal: {crystal.name}")
    print(f"gvm_condition: {crystal.gvm_condition}")
    print(f"lambda_c_nm: {center_nm:.3f}")
    print(f"pump_nm: {center_nm / 2:.3f}")
    print(f"residual_s_per_m: {format_value(gvm_residual(crystal, center_nm))}")
    for role, w in (("pump", 2 * omega), ("signal", omega), ("idler", omega)):
        print(f"group_index_{role}: {float(group_index(crystal, role, w, theta)):.6f}")
    if theta is None:
        print(f"poling_period_um: {poling_period_um(offset):.4f}")
    else:
        print(f"theta_deg: {np.degrees(theta):.4f}")
    return EXIT_OK


def cmd_optimize(run: RunConfig) -> int:
    point, budget, center_nm = run_optimize(run)
    metrics = point.metrics
    print(f"lambda_c_nm: {center_nm:.3f}")
    print(f"L_mm: {format_value(point.length_mm)}")
    print(f"pump_fwhm_nm: {format_value(point.pump_fwhm_nm)}")
    print(f"eta: {format_value(metrics.transmission)}")
    print(f"x2: {format_value(metrics.purity)}")
    print(f"hom_visibility: {format_value(hom_visibility(metrics.purity))}")
    print(f"alpha: {format_value(metrics.alpha)}")
    print(f"purity_unfiltered: {format_value(metrics.purity_unfiltered)}")
    print(f"k_max: {metrics.k_max}")
    print(f"alpha_required: {format_value(budget.alpha_required)}")
    print(f"eta_tb: {format_value(budget.eta_budget)}")
    print(f"converged: {format_value(point.converged)}")
    return EXIT_OK


def cmd_sweep(run: RunConfig) -> int:
    _, path = run_sweep(run)
    print(path)
    return EXIT_OK


def cmd_table(run: RunConfig) -> int:
    _, path = run_table(run)
    print(path)
    return EXIT_OK


def cmd_jsa(run: RunConfig, intensity: bool = False) -> int:
    for path in run_jsa_dump(run, intensity):
        print(path)
    return EXIT_OK


def cmd_converge(run: RunConfig) -> int:
    _, path = run_convergence(run)
    print(path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and map errors onto exit codes

    Returns:
        0 ok, 2 configuration error, 3 resource guard, 1 other failure
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or settings.LOG_LEVEL)

    try:
        run = run_config_from_args(args)
        if args.command == "gvm":
            return cmd_gvm(run)
        if args.command == "jsa":
            return cmd_jsa(run, intensity=args.jsi)
        if args.command == "optimize":
            return cmd_optimize(run)
        if args.command == "sweep":
            return cmd_sweep(run)
        if args.command == "table":
            return cmd_table(run)
        return cmd_converge(run)

    except ResourceGuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as e:
        print(f"error: invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SpdcError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
