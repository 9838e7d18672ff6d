"""Bounds on the distortion-power-rate tradeoff for Gaussian information
embedding with host-signal reconstruction, the perfect-recovery capacity, and
vector-Witsenhausen weighted-cost envelopes."""

__version__ = "0.1.0"

from .core import (
    BoundResult,
    FeasibilityError,
    Interval,
    NOISE_VAR,
    ParameterError,
    ProblemParams,
    feasible,
    sigma_su_range,
)
from .lower_bounds import (
    GammaSearchConfig,
    SigmaSuSearchConfig,
    lb_inner,
    lb_sup_gamma,
    lower_bound_curve,
    lower_bound_mmse,
    old_lower_bound,
)
from .achievability import (
    DegenerateStrategyError,
    McConfig,
    StrategyParams,
    UpperSearchConfig,
    achievable_rate_alpha1,
    capacity,
    dpc_rate,
    lmmse_x,
    mc_lmmse_check,
    upper_bound_curve,
    upper_bound_mmse,
)
from .witsenhausen import (
    PowerSweepConfig,
    SweepTable,
    WeightedCostResult,
    cost_ratio_surface,
    mmse_ratio_surface,
    mmse_vs_rate,
    power_for_mmse,
    ratio_with_conventions,
    weighted_cost,
)

__all__ = [
    "BoundResult",
    "DegenerateStrategyError",
    "FeasibilityError",
    "GammaSearchConfig",
    "Interval",
    "McConfig",
    "NOISE_VAR",
    "ParameterError",
    "PowerSweepConfig",
    "ProblemParams",
    "SigmaSuSearchConfig",
    "StrategyParams",
    "SweepTable",
    "UpperSearchConfig",
    "WeightedCostResult",
    "achievable_rate_alpha1",
    "capacity",
    "cost_ratio_surface",
    "dpc_rate",
    "feasible",
    "lb_inner",
    "lb_sup_gamma",
    "lmmse_x",
    "lower_bound_curve",
    "lower_bound_mmse",
    "mc_lmmse_check",
    "mmse_ratio_surface",
    "mmse_vs_rate",
    "old_lower_bound",
    "power_for_mmse",
    "ratio_with_conventions",
    "sigma_su_range",
    "upper_bound_curve",
    "upper_bound_mmse",
    "weighted_cost",
]
