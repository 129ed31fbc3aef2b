"""
Table Task Runner
alpha_opt and transmission budget for every catalog crystal, phase-matching
shape and filter shape
"""

import logging
from pathlib import Path
from typing import List, Tuple

from spdcopt.models.crystal import CrystalSpec
from spdcopt.models.results import TableRow
from spdcopt.models.run import RunConfig
from spdcopt.models.source import FilterSpec
from spdcopt.services.dispersion import find_gvm_center
from spdcopt.services.metrics import complexity_budget, filter_break_even
from spdcopt.services.optimizer import (
    build_problem,
    default_bandwidths,
    maximize_alpha,
    sweep_filter_bandwidths,
)
from spdcopt.tasks.common import grid_for
from spdcopt.utils.catalog import Catalog
from spdcopt.utils.io import output_path, write_table_csv

logger = logging.getLogger(__name__)

FILTER_SHAPES = ("gaussian", "rectangular")
TABLE_FILE = "table.csv"


def table_rows(crystal: CrystalSpec, run: RunConfig) -> List[TableRow]:
    """Rows for one crystal: best filter per (pm shape, filter shape)"""
    grid = grid_for(crystal, run)
    center_nm = find_gvm_center(crystal)
    bandwidths = run.bandwidths or default_bandwidths()
    rows = []

    for pm_shape in crystal.pm_shapes:
        unfiltered = maximize_alpha(build_problem(
            crystal, pm_shape, FilterSpec(), grid=grid, center_nm=center_nm, error_bound=run.error_bound,
        ))
        for filter_shape in FILTER_SHAPES:
            sweep = sweep_filter_bandwidths(
                crystal, pm_shape, filter_shape, bandwidths, grid=grid,
                warm_start=run.warm_start, workers=run.workers,
                center_nm=center_nm, error_bound=run.error_bound,
            )
            best = sweep.best
            budget = complexity_budget(best.point.alpha, run.error_bound, run.target_k)
            if not budget.feasible:
                logger.warning(f"⚠️ {crystal.display_name(pm_shape)} ({filter_shape}) misses the target")
            rows.append(TableRow(
                crystal=crystal.display_name(pm_shape),
                pm_shape=pm_shape,
                filter_shape=filter_shape,
                alpha_opt=best.point.alpha,
                eta_tb=budget.eta_budget,
                lambda_c_nm=center_nm,
                length_mm=best.point.length_mm,
                pump_fwhm_nm=best.point.pump_fwhm_nm,
                filter_fwhm_nm=best.filter_fwhm_nm,
                k_max=best.k_max,
                feasible=budget.feasible,
                filter_break_even=filter_break_even(best.point.alpha, unfiltered.alpha),
            ))
    return rows


def run_table(run: RunConfig) -> Tuple[List[TableRow], Path]:
    """
    Build the full table for the catalog

    An empty catalog produces a header-only file.

    Returns:
        (rows, CSV path)
    """
    try:
        crystals = Catalog.load()
        logger.info(f"🔄 Starting table for {len(crystals)} crystals")

        rows: List[TableRow] = []
        for crystal in crystals.values():
            rows.extend(table_rows(crystal, run))

        path = write_table_csv(output_path(run.output_dir, TABLE_FILE), rows)
        logger.info(f"✅ Table complete: {len(rows)} rows")
        return rows, path

    except Exception as e:
        logger.error(f"❌ Table error: {e}")
        raise
