"""
Filter Sweep Task Runner
Optimum per filter bandwidth for one crystal, written as CSV
"""

import logging
from pathlib import Path
from typing import Tuple

from spdcopt.models.results import SweepResult
from spdcopt.models.run import RunConfig
from spdcopt.services.optimizer import default_bandwidths, sweep_filter_bandwidths
from spdcopt.tasks.common import artifact_name, crystal_for, grid_for
from spdcopt.utils.io import output_path, write_sweep_csv

logger = logging.getLogger(__name__)


def run_sweep(run: RunConfig) -> Tuple[SweepResult, Path]:
    """
    Sweep filter bandwidths and store the curve

    Returns:
        (SweepResult, CSV path)
    """
    try:
        crystal = crystal_for(run)
        logger.info(f"🔄 Starting sweep for {crystal.display_name(run.pm_shape)} ({run.filter_shape})")

        bandwidths = run.bandwidths or ([run.fwhm_nm] if run.fwhm_nm else default_bandwidths())
        result = sweep_filter_bandwidths(
            crystal,
            run.pm_shape,
            run.filter_shape,
            bandwidths,
            grid=grid_for(crystal, run),
            warm_start=run.warm_start,
            workers=run.workers,
            error_bound=run.error_bound,
        )
        path = write_sweep_csv(output_path(run.output_dir, artifact_name(crystal, run, "sweep") + ".csv"), result)

        best = result.best
        logger.info(f"✅ Sweep complete: best alpha={best.point.alpha:.4f} at {best.filter_fwhm_nm:g} nm")
        return result, path

    except Exception as e:
        logger.error(f"❌ Sweep error: {e}")
        raise
