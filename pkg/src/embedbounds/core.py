"""Domain types, feasibility logic, and shared scalar utilities.

All quantities are in noise-normalized units: the channel noise variance is
fixed to 1. A problem with noise variance v is handled by the caller through
rescaling (sigma -> sigma/sqrt(v), power -> power/v; distortions scale by v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Channel noise variance (fixed; see module docstring).
NOISE_VAR = 1.0


class ParameterError(ValueError):
    """Invalid argument outside an operation's domain."""


class FeasibilityError(ValueError):
    """Rate R is not supportable at power P (requires P >= 2^{2R} - 1)."""


@dataclass(frozen=True)
class ProblemParams:
    """Evaluation point (sigma, P, R) for every bound.

    sigma: host standard deviation, > 0 (sigma = 0 is rejected: several
        formulas divide by sigma^2 and no supported result needs the limit).
    power: input power budget P >= 0.
    rate: message rate R >= 0 in bits per channel use.
    """

    sigma: float
    power: float
    rate: float = 0.0

    def __post_init__(self):
        for name in ("sigma", "power", "rate"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ParameterError(f"{name} must be a finite number, got {v!r}")
        if self.sigma <= 0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if self.power < 0:
            raise ParameterError(f"power must be >= 0, got {self.power}")
        if self.rate < 0:
            raise ParameterError(f"rate must be >= 0, got {self.rate}")


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ParameterError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class BoundResult:
    """A bound value together with the optimizing internal variables.

    gamma_star is set for the lower bound only; alpha_star/beta_star for the
    upper bound only (alpha_star is None when the pure-linear strategy with
    no coded part wins).
    """

    value: float
    sigma_su_star: float | None = None
    gamma_star: float | None = None
    alpha_star: float | None = None
    beta_star: float | None = None


def pos_part(x):
    """Positive part (x)^+ = max(x, 0); works on scalars and arrays."""
    return np.maximum(x, 0.0)


def log2(x):
    """Base-2 logarithm; works on scalars and arrays."""
    return np.log2(x)


def rate_power_floor(rate: float) -> float:
    """Minimum power 2^{2R} - 1 at which rate R is supportable."""
    return math.pow(2.0, 2.0 * rate) - 1.0


def feasible(params: ProblemParams) -> bool:
    """True iff reliable communication at params.rate is possible: P >= 2^{2R} - 1.

    The boundary P = 2^{2R} - 1 counts as feasible (closed set), so e.g.
    P = 1 at R = 0.5 is evaluable.
    """
    return params.power >= rate_power_floor(params.rate)


def require_feasible(params: ProblemParams) -> None:
    if not feasible(params):
        raise FeasibilityError(
            f"rate {params.rate} not supportable at power {params.power}: "
            f"requires P >= {rate_power_floor(params.rate):.6g}"
        )


def sigma_su_range(params: ProblemParams) -> Interval:
    """Feasible range of the host-input correlation sigma_SU = E[SU].

    Cauchy-Schwarz gives |sigma_SU| <= sigma*sqrt(P); supporting rate R
    additionally requires sigma_SU >= (2^{2R} - 1 - P - sigma^2)/2. At R = 0
    the range is the full [-sigma*sqrt(P), sigma*sqrt(P)].
    """
    require_feasible(params)
    hi = params.sigma * math.sqrt(params.power)
    lo = max(-hi, (rate_power_floor(params.rate) - params.power - params.sigma**2) / 2.0)
    return Interval(min(lo, hi), hi)
