"""
Single Optimization Task Runner
Optimum (L, pump FWHM) for one fixed filter
"""

import logging
from typing import Tuple

from spdcopt.models.results import ComplexityBudget, OptimalPoint
from spdcopt.models.run import RunConfig
from spdcopt.services.metrics import complexity_budget
from spdcopt.services.optimizer import build_problem, maximize_alpha
from spdcopt.tasks.common import crystal_for, filter_for, grid_for

logger = logging.getLogger(__name__)


def run_optimize(run: RunConfig) -> Tuple[OptimalPoint, ComplexityBudget, float]:
    """
    Maximize alpha for the run's filter

    Returns:
        (optimum, loss budget for the run's target, degenerate wavelength in nm)
    """
    try:
        crystal = crystal_for(run)
        logger.info(f"🔄 Optimizing {crystal.display_name(run.pm_shape)} with {run.filter_shape} filter")

        problem = build_problem(
            crystal, run.pm_shape, filter_for(run),
            grid=grid_for(crystal, run), error_bound=run.error_bound,
        )
        point = maximize_alpha(problem)
        budget = complexity_budget(point.alpha, run.error_bound, run.target_k)

        logger.info(f"✅ Optimum: alpha={point.alpha:.4f} after {point.evaluations} evaluations")
        return point, budget, problem.center_nm

    except Exception as e:
        logger.error(f"❌ Optimization error: {e}")
        raise
