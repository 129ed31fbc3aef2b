"""
Metrics Service
Schmidt purity, heralding transmission, source quality alpha and the
boson-sampling complexity quantities (k, alpha_k, transmission budget)
"""

import logging
from typing import Optional, Union

import numpy as np
from scipy.linalg import eigvalsh, svdvals
from scipy.optimize import bisect

from spdcopt.config import settings
from spdcopt.errors import (
    ConfigurationError,
    DegenerateInputError,
    GridMismatchError,
    InfeasibleTargetError,
)
from spdcopt.models.results import ComplexityBudget, SchmidtResult
from spdcopt.models.source import JointAmplitude

logger = logging.getLogger(__name__)

# Round-off allowed on probabilities before they are rejected
PROBABILITY_SLACK = 1e-9
ALPHA_XTOL = 1e-12


def _matrix(jsa: Union[JointAmplitude, np.ndarray]) -> np.ndarray:
    values = jsa.values if isinstance(jsa, JointAmplitude) else np.asarray(jsa, dtype=float)
    if values.ndim != 2:
        raise ConfigurationError(f"expected a 2-D amplitude, got shape {values.shape}")
    return values


def _probability(name: str, value: float) -> float:
    if not np.isfinite(value) or not -PROBABILITY_SLACK <= value <= 1 + PROBABILITY_SLACK:
        raise ConfigurationError(f"{name}={value} outside [0, 1]")
    return float(min(max(value, 0.0), 1.0))


def schmidt_purity(jsa: Union[JointAmplitude, np.ndarray], method: Optional[str] = None) -> SchmidtResult:
    """
    Schmidt decomposition of a discretized JSA

    Args:
        jsa: JointAmplitude or plain 2-D array
        method: "svd" (singular values) or "gram" (eigenvalues of the smaller
            Gram matrix); defaults to settings.PURITY_METHOD

    Returns:
        SchmidtResult with descending coefficients, K and P = 1/K
    """
    method = method or settings.PURITY_METHOD
    matrix = _matrix(jsa)
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    if scale == 0.0:
        raise DegenerateInputError("JSA is identically zero")
    matrix = matrix / scale

    if method == "svd":
        weights = svdvals(matrix) ** 2
    elif method == "gram":
        gram = matrix @ matrix.T if matrix.shape[0] <= matrix.shape[1] else matrix.T @ matrix
        weights = np.clip(eigvalsh(gram), 0.0, None)
    else:
        raise ConfigurationError(f"Unknown purity method: {method}")

    coeffs = np.sort(weights)[::-1] / np.sum(weights)
    K = 1.0 / float(np.sum(coeffs ** 2))
    return SchmidtResult(schmidt_coeffs=coeffs, K=K, P=1.0 / K)


def heralding_transmission(unfiltered: JointAmplitude, filtered: JointAmplitude,
                           method: Optional[str] = None) -> float:
    """
    Overlap of the filtered and unfiltered JSA

    Args:
        unfiltered: JSA before the herald filter
        filtered: Same JSA after the filter, on the same grid
        method: "norm_ratio" |Ff|^2 / |f|^2, "inner_product" <f, Ff> / |f|^2 or
            "fidelity" <f, Ff>^2 / (|f|^2 |Ff|^2); defaults to settings.TRANSMISSION_METHOD.
            All three agree for a rectangular window.

    Returns:
        eta in [0, 1]
    """
    method = method or settings.TRANSMISSION_METHOD
    if not unfiltered.same_grid(filtered):
        raise GridMismatchError("filtered and unfiltered JSA are sampled on different grids")
    reference = float(np.sum(unfiltered.values ** 2))
    if reference == 0.0:
        raise DegenerateInputError("unfiltered JSA has zero norm")
    passed = float(np.sum(filtered.values ** 2))

    if method == "norm_ratio":
        value = passed / reference
    elif method == "inner_product":
        value = float(np.sum(unfiltered.values * filtered.values)) / reference
    elif method == "fidelity":
        if passed == 0.0:
            return 0.0
        value = float(np.sum(unfiltered.values * filtered.values)) ** 2 / (reference * passed)
    else:
        raise ConfigurationError(f"Unknown transmission method: {method}")
    return _probability("eta", value)


def source_quality(transmission: float, purity: float) -> float:
    """alpha = eta * x^2 with x^2 equal to the heralded purity"""
    return _probability("eta", transmission) * _probability("purity", purity)


def hom_visibility(purity: float) -> float:
    """Signal-signal HOM visibility of two independent heralded photons"""
    return _probability("purity", purity)


def _check_domain(alpha: float, error_bound: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha={alpha} outside (0, 1)")
    if not 0.0 < error_bound < 1.0:
        raise ConfigurationError(f"error bound {error_bound} outside (0, 1)")


def _exponent_shift(convention: Optional[str]) -> int:
    convention = convention or settings.K_CONVENTION
    if convention == "alpha_k":
        return 0
    if convention == "alpha_k_plus_1":
        return 1
    raise ConfigurationError(f"Unknown k convention: {convention}")


def k_star(alpha: float, error_bound: float = 0.1, convention: Optional[str] = None) -> int:
    """
    Largest k with alpha^k / (1 - alpha) > E^2

    Args:
        alpha: Source quality in (0, 1)
        error_bound: Classical simulation error bound E in (0, 1)
        convention: "alpha_k" or "alpha_k_plus_1" (threshold alpha^(k+1))

    Returns:
        Classical truncation order, never negative
    """
    _check_domain(alpha, error_bound)
    shift = _exponent_shift(convention)
    ratio = np.log(error_bound ** 2 * (1.0 - alpha)) / np.log(alpha)
    return max(int(np.floor(ratio)) - shift, 0)


def alpha_required(k: int, error_bound: float = 0.1, convention: Optional[str] = None) -> float:
    """
    Source quality needed for a k-photon experiment at error bound E

    Root of alpha^k / (1 - alpha) = E^2, bisected on the log form
    k ln(alpha) - ln(1 - alpha) - 2 ln(E), which increases on (0, 1).
    """
    if k < 1:
        raise ConfigurationError(f"photon number k={k} must be >= 1")
    if not 0.0 < error_bound < 1.0:
        raise ConfigurationError(f"error bound {error_bound} outside (0, 1)")
    exponent = k + _exponent_shift(convention)
    target = 2.0 * np.log(error_bound)

    def excess(alpha: float) -> float:
        return exponent * np.log(alpha) - np.log1p(-alpha) - target

    lo, hi = np.finfo(float).tiny, np.nextafter(1.0, 0.0)
    return float(bisect(excess, lo, hi, xtol=ALPHA_XTOL, maxiter=500))


def transmission_budget(alpha_opt: float, alpha_req: float) -> float:
    """eta_TB = alpha_required / alpha_opt"""
    if not 0.0 < alpha_req < 1.0:
        raise ConfigurationError(f"alpha_required={alpha_req} outside (0, 1)")
    if not 0.0 < alpha_opt <= 1.0 + PROBABILITY_SLACK:
        raise ConfigurationError(f"alpha_opt={alpha_opt} outside (0, 1]")
    if alpha_opt < alpha_req:
        raise InfeasibleTargetError(
            f"alpha_opt={alpha_opt:.6g} is below the required {alpha_req:.6g}"
        )
    return alpha_req / min(alpha_opt, 1.0)


def complexity_budget(alpha_opt: float, error_bound: float = 0.1, target_k: int = 50,
                      convention: Optional[str] = None) -> ComplexityBudget:
    """Loss budget left for a target_k-photon experiment; infeasible targets are flagged"""
    required = alpha_required(target_k, error_bound, convention)
    try:
        budget = transmission_budget(alpha_opt, required)
    except InfeasibleTargetError as e:
        logger.warning(f"⚠️ {e}")
        return ComplexityBudget(
            error_bound=error_bound, target_k=target_k, alpha_required=required,
            alpha_opt=alpha_opt, eta_budget=None, feasible=False,
        )
    return ComplexityBudget(
        error_bound=error_bound, target_k=target_k, alpha_required=required,
        alpha_opt=alpha_opt, eta_budget=budget, feasible=True,
    )


def filter_break_even(alpha_filtered: float, alpha_unfiltered: float) -> float:
    """Peak filter transmission below which filtering stops paying off"""
    if alpha_filtered <= 0.0:
        raise DegenerateInputError("filtered alpha must be positive")
    return alpha_unfiltered / alpha_filtered
