"""
Convergence Task Runner
Deviation of alpha from a fine reference grid at coarser resolutions
"""

import logging
from pathlib import Path
from typing import List, Tuple

from spdcopt.models.results import ConvergencePoint
from spdcopt.models.run import RunConfig
from spdcopt.models.source import PumpSpec, SourceConfig
from spdcopt.services.jsa import check_grid_memory
from spdcopt.services.optimizer import build_problem, convergence_study, maximize_alpha
from spdcopt.tasks.common import artifact_name, crystal_for, filter_for, grid_for
from spdcopt.utils.io import output_path, write_convergence_csv

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTIONS = [250, 500, 1000]
DEFAULT_REFERENCE = 2000


def run_convergence(run: RunConfig) -> Tuple[List[ConvergencePoint], Path]:
    """
    Convergence study at the run's operating point

    Without an explicit (L, pump FWHM) the optimum is first located on the
    largest tested resolution.

    Returns:
        (points, CSV path)
    """
    try:
        crystal = crystal_for(run)
        resolutions = run.resolutions or DEFAULT_RESOLUTIONS
        reference = run.reference_n or max(DEFAULT_REFERENCE, max(resolutions))
        check_grid_memory(reference)

        problem = build_problem(
            crystal, run.pm_shape, filter_for(run),
            grid=grid_for(crystal, run, max(resolutions)), error_bound=run.error_bound,
        )
        if run.length_mm and run.pump_fwhm_nm:
            length_mm, pump_fwhm_nm = run.length_mm, run.pump_fwhm_nm
        else:
            logger.info("🔄 Locating the optimum before the convergence study")
            point = maximize_alpha(problem)
            length_mm, pump_fwhm_nm = point.length_mm, point.pump_fwhm_nm

        config = SourceConfig(
            crystal=crystal,
            pump=PumpSpec(center_nm=problem.pump_center_nm, fwhm_nm=pump_fwhm_nm),
            length_mm=length_mm,
            pm_offset=problem.pm_offset,
            pm_shape=run.pm_shape,
        )
        points = convergence_study(config, problem.filter, resolutions, reference, grid=problem.grid)
        path = write_convergence_csv(
            output_path(run.output_dir, artifact_name(crystal, run, "converge") + ".csv"), points,
        )

        logger.info(f"✅ Convergence study complete: max deviation {max(p.deviation for p in points):.2e}")
        return points, path

    except Exception as e:
        logger.error(f"❌ Convergence error: {e}")
        raise
