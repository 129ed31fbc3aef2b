"""
JSA Dump Task Runner
Writes the (optionally filtered) JSA of one operating point for plotting
"""

import logging
from pathlib import Path
from typing import List

from spdcopt.models.run import RunConfig
from spdcopt.models.source import PumpSpec, SourceConfig
from spdcopt.services.dispersion import find_gvm_center, solve_pm_offset
from spdcopt.services.jsa import apply_herald_filter, assemble_jsa, marginal_spectra
from spdcopt.tasks.common import artifact_name, crystal_for, filter_for, grid_for
from spdcopt.utils.io import output_path, write_jsa_dump

logger = logging.getLogger(__name__)


def run_jsa_dump(run: RunConfig, intensity: bool = False) -> List[Path]:
    """
    Dump the JSA at (L, pump FWHM) from the run, box midpoint by default

    Without a filter the unfiltered JSA is written; with a filter the filtered
    one, plus the unfiltered one when run.pair is set.

    Returns:
        Written matrix paths
    """
    try:
        crystal = crystal_for(run)
        center_nm = find_gvm_center(crystal)
        mid_length, mid_fwhm = crystal.bounds.midpoint()
        config = SourceConfig(
            crystal=crystal,
            pump=PumpSpec(center_nm=center_nm / 2, fwhm_nm=run.pump_fwhm_nm or mid_fwhm),
            length_mm=run.length_mm or mid_length,
            pm_offset=solve_pm_offset(crystal, center_nm / 2, center_nm, center_nm),
            pm_shape=run.pm_shape,
        )
        grid = grid_for(crystal, run)
        logger.info(
            f"🔄 Assembling {grid.points}x{grid.points} JSA for {crystal.display_name(run.pm_shape)} "
            f"(L={config.length_mm:g} mm, pump={config.pump.fwhm_nm:g} nm)"
        )

        stem = artifact_name(crystal, run, "jsa")
        unfiltered = assemble_jsa(config, grid)
        paths = []

        def dump(suffix, jsa):
            target = output_path(run.output_dir, stem + suffix)
            paths.append(write_jsa_dump(target, jsa, intensity, marginals=marginal_spectra(jsa)))

        if run.filter_shape == "none":
            dump("", unfiltered)
        else:
            dump("_filtered", apply_herald_filter(unfiltered, filter_for(run, center_nm)))
            if run.pair:
                dump("_unfiltered", unfiltered)

        logger.info(f"✅ JSA dump complete: {len(paths)} files")
        return paths

    except Exception as e:
        logger.error(f"❌ JSA dump error: {e}")
        raise
