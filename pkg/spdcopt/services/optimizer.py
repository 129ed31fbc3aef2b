"""
Optimizer Service
Bounded maximization of alpha over (crystal length, pump bandwidth),
filter-bandwidth sweeps and the grid-convergence study
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from spdcopt.config import settings
from spdcopt.errors import ConfigurationError, NonFiniteObjectiveError
from spdcopt.models.crystal import CrystalSpec
from spdcopt.models.results import (
    ConvergencePoint,
    OptimalPoint,
    OptimizationProblem,
    SourceMetrics,
    SweepResult,
    SweepRow,
)
from spdcopt.models.source import FilterSpec, FrequencyGrid, PumpSpec, SourceConfig
from spdcopt.services.dispersion import find_gvm_center, solve_pm_offset
from spdcopt.services.jsa import (
    apply_herald_filter,
    assemble_jsa,
    check_grid_memory,
    make_grid,
)
from spdcopt.services.metrics import heralding_transmission, k_star, schmidt_purity

logger = logging.getLogger(__name__)

Objective = Callable[[float, float], SourceMetrics]


def _k_max(alpha: float, error_bound: float) -> int:
    if alpha <= 0.0:
        return 0
    return k_star(min(alpha, np.nextafter(1.0, 0.0)), error_bound)


def evaluate_source(config: SourceConfig, filter_spec: FilterSpec, grid: FrequencyGrid,
                    error_bound: Optional[float] = None) -> SourceMetrics:
    """
    Full pipeline for one operating point: JSA -> herald filter -> (P, eta, alpha, k)

    Args:
        config: SPDC operating point
        filter_spec: Herald filter; an uncentred filter sits on the degenerate wavelength
        grid: Wavelength grid
        error_bound: E used for k_max (settings default when omitted)

    Returns:
        SourceMetrics including the purity before filtering
    """
    error_bound = settings.DEFAULT_ERROR_BOUND if error_bound is None else error_bound
    unfiltered = assemble_jsa(config, grid)
    purity_unfiltered = schmidt_purity(unfiltered).P

    if filter_spec.shape == "none":
        transmission, purity = 1.0, purity_unfiltered
    else:
        if filter_spec.center_nm is None:
            filter_spec = filter_spec.centered(2 * config.pump.center_nm)
        filtered = apply_herald_filter(unfiltered, filter_spec)
        transmission = heralding_transmission(unfiltered, filtered)
        purity = schmidt_purity(filtered).P if transmission > 0.0 else 0.0

    alpha = transmission * purity
    return SourceMetrics(
        purity=purity,
        transmission=transmission,
        alpha=alpha,
        k_max=_k_max(alpha, error_bound),
        purity_unfiltered=purity_unfiltered,
    )


def build_problem(crystal: CrystalSpec, pm_shape: str, filter_spec: FilterSpec,
                  grid: Optional[FrequencyGrid] = None, start: Optional[Tuple[float, float]] = None,
                  center_nm: Optional[float] = None, error_bound: Optional[float] = None) -> OptimizationProblem:
    """
    Derive the fixed parts of an optimization from the catalog entry

    The degenerate wavelength comes from the GVM condition, the pump sits at
    half of it and the phase-matching offset is solved there.
    """
    center_nm = find_gvm_center(crystal) if center_nm is None else center_nm
    pm_offset = solve_pm_offset(crystal, center_nm / 2, center_nm, center_nm)
    if grid is None:
        grid = make_grid(crystal.grid.lambda_nm[0], crystal.grid.lambda_nm[1], crystal.grid.points)
    if filter_spec.center_nm is None:
        filter_spec = filter_spec.centered(center_nm)
    return OptimizationProblem(
        crystal=crystal,
        pm_shape=pm_shape,
        filter=filter_spec,
        grid=grid,
        bounds=crystal.bounds,
        start=start or crystal.bounds.midpoint(),
        center_nm=center_nm,
        pm_offset=pm_offset,
        error_bound=settings.DEFAULT_ERROR_BOUND if error_bound is None else error_bound,
    )


def source_objective(problem: OptimizationProblem) -> Objective:
    """alpha(L, pump FWHM) for the problem's crystal, filter and grid"""

    def objective(length_mm: float, pump_fwhm_nm: float) -> SourceMetrics:
        config = SourceConfig(
            crystal=problem.crystal,
            pump=PumpSpec(center_nm=problem.pump_center_nm, fwhm_nm=pump_fwhm_nm),
            length_mm=length_mm,
            pm_offset=problem.pm_offset,
            pm_shape=problem.pm_shape,
        )
        return evaluate_source(config, problem.filter, problem.grid, problem.error_bound)

    return objective


def maximize_alpha(problem: OptimizationProblem, objective: Optional[Objective] = None) -> OptimalPoint:
    """
    Bounded local maximization of alpha

    L-BFGS-B with 3-point finite differences on the unit box; optima within
    BOUND_SNAP of a face are reported exactly on it.

    Args:
        problem: Crystal, filter, grid, bounds and start point
        objective: Replacement for the full pipeline, called as objective(L_mm, fwhm_nm)

    Returns:
        OptimalPoint never worse than the start point
    """
    objective = objective or source_objective(problem)
    lower = np.array([problem.bounds.length_mm[0], problem.bounds.pump_fwhm_nm[0]])
    upper = np.array([problem.bounds.length_mm[1], problem.bounds.pump_fwhm_nm[1]])
    span = upper - lower

    cache: Dict[Tuple[float, float], SourceMetrics] = {}

    def physical(u: np.ndarray) -> Tuple[float, float]:
        x = np.clip(lower + np.clip(u, 0.0, 1.0) * span, lower, upper)
        return float(x[0]), float(x[1])

    def evaluate(u: np.ndarray) -> SourceMetrics:
        key = physical(u)
        if key not in cache:
            metrics = objective(*key)
            if not np.isfinite(metrics.alpha):
                raise NonFiniteObjectiveError(key[0], key[1], metrics.alpha)
            cache[key] = metrics
            logger.debug(f"alpha({key[0]:.6g} mm, {key[1]:.6g} nm) = {metrics.alpha:.8f}")
        return cache[key]

    u0 = (np.asarray(problem.start) - lower) / span
    start_metrics = evaluate(u0)

    result = minimize(
        lambda u: -evaluate(u).alpha,
        u0,
        method="L-BFGS-B",
        jac="3-point",
        bounds=[(0.0, 1.0), (0.0, 1.0)],
        options={
            "ftol": settings.OPTIMIZER_FTOL,
            "gtol": settings.OPTIMIZER_GTOL,
            "maxiter": settings.OPTIMIZER_MAXITER,
            "finite_diff_rel_step": settings.OPTIMIZER_FD_STEP,
        },
    )

    u = np.clip(result.x, 0.0, 1.0)
    u = np.where(u < settings.BOUND_SNAP, 0.0, u)
    u = np.where(u > 1.0 - settings.BOUND_SNAP, 1.0, u)
    best_u, best = u, evaluate(u)
    if best.alpha < start_metrics.alpha:
        best_u, best = u0, start_metrics

    length_mm, pump_fwhm_nm = physical(best_u)
    if not result.success:
        logger.warning(f"⚠️ Optimizer stopped early: {result.message}")
    return OptimalPoint(
        length_mm=length_mm,
        pump_fwhm_nm=pump_fwhm_nm,
        metrics=best,
        evaluations=len(cache),
        converged=bool(result.success),
        start_alpha=start_metrics.alpha,
    )


def default_bandwidths() -> List[float]:
    """Logarithmic filter-bandwidth list from settings"""
    values = np.geomspace(settings.SWEEP_MIN_NM, settings.SWEEP_MAX_NM, settings.SWEEP_POINTS)
    return [float(f"{v:.4g}") for v in values]


def sweep_filter_bandwidths(crystal: CrystalSpec, pm_shape: str, filter_shape: str,
                            bandwidths: Sequence[float], grid: Optional[FrequencyGrid] = None,
                            warm_start: bool = True, workers: Optional[int] = None,
                            center_nm: Optional[float] = None, error_bound: Optional[float] = None,
                            objective_factory: Optional[Callable[[OptimizationProblem], Objective]] = None,
                            ) -> SweepResult:
    """
    Optimum (L, pump FWHM) for every filter bandwidth

    Rows are warm-started from the previous bandwidth's optimum (the first
    from the box midpoint). Without warm starts rows may run on a thread pool.

    Args:
        crystal: Crystal spec
        pm_shape: "sinc" or "gaussian_apodized"
        filter_shape: "gaussian", "rectangular" or "none"
        bandwidths: Strictly increasing filter bandwidths in nm
        grid: Wavelength grid (catalog default when omitted)
        warm_start: Chain start points between rows
        workers: Threads for independent rows
        center_nm: Degenerate wavelength (GVM solve when omitted)
        error_bound: E used for k_max
        objective_factory: Builds the objective for each problem (full pipeline when omitted)

    Returns:
        SweepResult with rows sorted by bandwidth
    """
    bandwidths = [float(b) for b in bandwidths]
    if not bandwidths or any(b <= 0 for b in bandwidths):
        raise ConfigurationError("bandwidth list must be non-empty and positive")
    if any(b >= a for a, b in zip(bandwidths[1:], bandwidths[:-1])):
        raise ConfigurationError(f"bandwidths must be strictly increasing: {bandwidths}")
    workers = workers or settings.SWEEP_WORKERS
    factory = objective_factory or source_objective

    base = build_problem(
        crystal, pm_shape, FilterSpec.of(filter_shape, bandwidths[0], convention=settings.FILTER_FWHM_CONVENTION),
        grid=grid, center_nm=center_nm, error_bound=error_bound,
    )
    logger.info(
        f"🔄 Sweeping {len(bandwidths)} {filter_shape} bandwidths for "
        f"{crystal.display_name(pm_shape)} at {base.center_nm:.1f} nm"
    )

    def solve(bandwidth: float, start: Tuple[float, float]) -> OptimalPoint:
        spec = FilterSpec.of(filter_shape, bandwidth, base.center_nm, settings.FILTER_FWHM_CONVENTION)
        problem = base.model_copy(update={"filter": spec, "start": start})
        point = maximize_alpha(problem, factory(problem))
        logger.info(
            f"📊 {bandwidth:g} nm: alpha={point.alpha:.4f} "
            f"(L={point.length_mm:.3g} mm, pump={point.pump_fwhm_nm:.3g} nm)"
        )
        return point

    points: List[OptimalPoint] = []
    if warm_start:
        if workers > 1:
            logger.warning("⚠️ Warm-started sweeps run sequentially; ignoring workers")
        start = base.start
        for bandwidth in bandwidths:
            point = solve(bandwidth, start)
            points.append(point)
            start = (point.length_mm, point.pump_fwhm_nm)
    elif workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(lambda b: solve(b, base.start), bandwidths))
    else:
        points = [solve(b, base.start) for b in bandwidths]

    rows = [
        SweepRow(filter_fwhm_nm=b, point=p, k_max=p.metrics.k_max)
        for b, p in zip(bandwidths, points)
    ]
    best_row = int(np.argmax([p.alpha for p in points]))
    return SweepResult(
        crystal=crystal.name,
        pm_shape=pm_shape,
        filter_shape=filter_shape,
        rows=rows,
        best_row=best_row,
    )


def convergence_study(config: SourceConfig, filter_spec: FilterSpec, resolutions: Sequence[int],
                      reference: int, grid: Optional[FrequencyGrid] = None,
                      memory_cap_mb: Optional[int] = None) -> List[ConvergencePoint]:
    """
    |alpha(N) - alpha(reference)| over grid resolutions on a fixed wavelength span

    Args:
        config: Operating point
        filter_spec: Herald filter
        resolutions: Points per axis to test
        reference: Reference points per axis, at least max(resolutions)
        grid: Span to resample (catalog grid when omitted)
        memory_cap_mb: Override of settings.MEMORY_CAP_MB

    Returns:
        One ConvergencePoint per resolution, in input order
    """
    resolutions = [int(n) for n in resolutions]
    if not resolutions:
        raise ConfigurationError("no resolutions given")
    if reference < max(resolutions):
        raise ConfigurationError(f"reference {reference} is below the largest resolution {max(resolutions)}")
    check_grid_memory(reference, memory_cap_mb)

    if grid is None:
        lo, hi = config.crystal.grid.lambda_nm
        grid = make_grid(lo, hi, reference)

    logger.info(f"🔄 Convergence study {resolutions} against {reference} points")
    alpha_ref = evaluate_source(config, filter_spec, grid.with_points(reference)).alpha
    results = []
    for n in resolutions:
        alpha = alpha_ref if n == reference else evaluate_source(config, filter_spec, grid.with_points(n)).alpha
        results.append(ConvergencePoint(points=n, alpha=alpha, deviation=abs(alpha - alpha_ref)))
        logger.info(f"📊 N={n}: alpha={alpha:.6f}, deviation={abs(alpha - alpha_ref):.2e}")
    return results
