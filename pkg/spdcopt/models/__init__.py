"""Models package"""

from spdcopt.models.crystal import (
    CrystalSpec,
    GridDefaults,
    ParameterBounds,
    Roles,
    SellmeierForm,
    SellmeierModel,
)
from spdcopt.models.source import (
    FilterSpec,
    FrequencyGrid,
    JointAmplitude,
    PumpSpec,
    SourceConfig,
)
from spdcopt.models.results import (
    ComplexityBudget,
    ConvergencePoint,
    OptimalPoint,
    OptimizationProblem,
    SchmidtResult,
    SourceMetrics,
    SweepResult,
    SweepRow,
    TableRow,
)
from spdcopt.models.run import RunConfig

__all__ = [
    "CrystalSpec", "GridDefaults", "ParameterBounds", "Roles", "SellmeierForm",
    "SellmeierModel", "FilterSpec", "FrequencyGrid", "JointAmplitude", "PumpSpec",
    "SourceConfig", "ComplexityBudget", "ConvergencePoint", "OptimalPoint",
    "OptimizationProblem", "SchmidtResult", "SourceMetrics", "SweepResult",
    "SweepRow", "TableRow", "RunConfig",
]
