"""Linear + dirty-paper-coding upper bound, perfect-recovery capacity, and a
Monte Carlo validator for the Gaussian LMMSE step.

Strategy family: the input splits into a linear part -beta*S (power
P_lin = beta^2 sigma^2) and a coded part U_dpc of power P_dpc = P - P_lin that
dirty-paper codes against the scaled host (1-beta)*S with parameter alpha.
Writing t = sigma^2 (1-beta)^2 and p = P_dpc, the decoded codeword is
V = alpha*(1-beta)*S + U_dpc, the channel output Y = X + Z with
X = (1-beta)*S + U_dpc, and

    rate(alpha, beta) = (1/2) log2( p (p + t + 1) / det ),
    det = p t (1-alpha)^2 + p + alpha^2 t,

where det is also the determinant of the (Y, V) covariance. The decoder's
linear MMSE of X from (Y, V) follows from the joint second moments:

    mmse = T - [T^2 (alpha^2 t + p) + (alpha t + p)^2 (1 - T)] / det,  T = t + p.

For fixed beta the constrained minimization over alpha is exact: mmse is a
ratio of quadratics whose stationary condition is a quadratic in alpha, and
the rate constraint det <= Dmax is a quadratic interval; the minimum is
attained at one of {constraint endpoints, stationary roots, alpha = 1,
alpha = p/(p+1)}. The upper bound scans a beta grid with golden refinement
over these per-beta exact minima, plus the pure-linear candidate at R = 0 and
the alpha = 1 perfect-recovery candidate whenever the rate allows it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BoundResult,
    FeasibilityError,
    ParameterError,
    ProblemParams,
    require_feasible,
)
from .search import golden_max_vec, golden_min_vec

#: admit rate >= R - RATE_TOL_BITS so the measure-zero feasible set at the
#: exact power floor P = 2^{2R} - 1 survives floating point. Kept within a
#: few ulps of the det/Dmax comparison noise: near a rate maximum the
#: admitted alpha-neighborhood has width ~sqrt(tol), so a sloppy tolerance
#: leaks sqrt(tol)-sized value error below the true boundary optimum.
RATE_TOL_BITS = 2e-15

#: mmse below this relative level is subtraction noise; snap to exactly 0.
MMSE_SNAP_RTOL = 1e-12


class DegenerateStrategyError(ParameterError):
    """Strategy has no coded part (P_dpc <= 0) or a singular (Y, V) covariance."""


@dataclass(frozen=True)
class StrategyParams:
    """DPC parameter alpha and host-scaling factor beta of the strategy family."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ParameterError("alpha and beta must be finite")
        if self.beta < 0.0:
            raise ParameterError(f"beta must be >= 0, got {self.beta}")


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo sample count and seed (both mandatory for reproducibility)."""

    samples: int
    seed: int

    def __post_init__(self):
        if self.samples < 10_000:
            raise ParameterError("samples must be >= 10^4")


@dataclass(frozen=True)
class UpperSearchConfig:
    """beta grid size and golden refinement effort for the upper bound."""

    beta_points: int = 401
    refine_iters: int = 40

    def __post_init__(self):
        if self.beta_points < 3:
            raise ParameterError("beta_points must be >= 3")
        if self.refine_iters < 0:
            raise ParameterError("refine_iters must be >= 0")


DEFAULT_UPPER_CFG = UpperSearchConfig()


def beta_max(sigma: float, power: float) -> float:
    """Largest admissible host-scaling factor min(1, sqrt(P)/sigma)."""
    return min(1.0, math.sqrt(power) / sigma)


def _split(sigma: float, power: float, beta):
    """(t, p) = (scaled host variance, DPC power) for the given beta."""
    beta = np.asarray(beta, dtype=float)
    t = sigma * sigma * (1.0 - beta) ** 2
    p = power - beta * beta * sigma * sigma
    return t, p


def _validate_strategy(sigma: float, power: float, sp: StrategyParams) -> tuple[float, float]:
    bmax = beta_max(sigma, power)
    if sp.beta > bmax * (1.0 + 1e-12) + 1e-300:
        raise ParameterError(
            f"beta {sp.beta} exceeds min(1, sqrt(P)/sigma) = {bmax:.12g}"
        )
    t, p = _split(sigma, power, min(sp.beta, bmax))
    return float(t), float(p)


def dpc_rate(sigma: float, power: float, sp: StrategyParams) -> float:
    """Rate (bits/use) achieved by the coded part; requires P_dpc > 0."""
    t, p = _validate_strategy(sigma, power, sp)
    if p <= 0.0:
        raise DegenerateStrategyError(
            f"P_dpc = {p:.6g} <= 0; the pure-linear case has no coded rate"
        )
    a = sp.alpha
    det = p * t * (1.0 - a) ** 2 + p + a * a * t
    return 0.5 * math.log2(p * (p + t + 1.0) / det)


def _lmmse_from_moments(t, p, alpha):
    """Closed-form LMMSE of X from (Y, V); array-friendly. Returns (mmse, det)."""
    T = t + p
    det = p * t * (1.0 - alpha) ** 2 + p + alpha * alpha * t
    num = T * T * (alpha * alpha * t + p) + (alpha * t + p) ** 2 * (1.0 - T)
    with np.errstate(invalid="ignore", divide="ignore"):
        mmse = T - num / det
    mmse = np.clip(mmse, 0.0, T)
    mmse = np.where(mmse <= MMSE_SNAP_RTOL * np.maximum(1.0, T), 0.0, mmse)
    return mmse, det


def lmmse_x(sigma: float, power: float, sp: StrategyParams) -> float:
    """Linear MMSE of X given (Y, V) for the strategy; in [0, t + P_dpc]."""
    t, p = _validate_strategy(sigma, power, sp)
    if p <= 0.0:
        raise DegenerateStrategyError("P_dpc <= 0; no decoded codeword to condition on")
    mmse, det = _lmmse_from_moments(t, p, sp.alpha)
    if not (float(det) > 0.0 and math.isfinite(float(det))):
        raise DegenerateStrategyError(f"singular (Y, V) covariance: det = {float(det):.6g}")
    return float(mmse)


def lmmse_coefficients(sigma: float, power: float, sp: StrategyParams) -> tuple[float, float]:
    """Estimator weights (w_y, w_v) with Xhat = w_y Y + w_v V (shared with the MC check)."""
    t, p = _validate_strategy(sigma, power, sp)
    if p <= 0.0:
        raise DegenerateStrategyError("P_dpc <= 0")
    a = sp.alpha
    T = t + p
    var_y = T + 1.0
    var_v = a * a * t + p
    c_yv = a * t + p  # = E[XV] = E[YV]
    c_xy = T
    c_xv = a * t + p
    det = var_y * var_v - c_yv * c_yv
    if not (det > 0.0 and math.isfinite(det)):
        raise DegenerateStrategyError(f"singular (Y, V) covariance: det = {det:.6g}")
    w_y = (c_xy * var_v - c_xv * c_yv) / det
    w_v = (c_xv * var_y - c_xy * c_yv) / det
    return w_y, w_v


def mc_lmmse_check(
    sigma: float, power: float, sp: StrategyParams, mc: McConfig
) -> tuple[float, float]:
    """Empirical mean-square error of the lmmse_x estimator and its standard error.

    Draws (S, U_dpc, Z) per the module's second-moment model and applies the
    same linear coefficients as lmmse_x. Streams are seed-partitioned per
    chunk so chunked (or parallel) execution reproduces the serial result.
    """
    t, p = _validate_strategy(sigma, power, sp)
    w_y, w_v = lmmse_coefficients(sigma, power, sp)
    scale_s = sigma * (1.0 - min(sp.beta, beta_max(sigma, power)))
    chunk = 1 << 20
    n_chunks = (mc.samples + chunk - 1) // chunk
    children = np.random.SeedSequence(mc.seed).spawn(n_chunks)
    total = 0.0
    total_sq = 0.0
    n_done = 0
    for i in range(n_chunks):
        m = min(chunk, mc.samples - n_done)
        g = np.random.default_rng(children[i])
        s_scaled = g.standard_normal(m) * scale_s  # (1-beta) S directly
        u = g.standard_normal(m) * math.sqrt(p)
        z = g.standard_normal(m)
        x = s_scaled + u
        y = x + z
        v = sp.alpha * s_scaled + u
        err = x - (w_y * y + w_v * v)
        sq = err * err
        total += float(np.sum(sq))
        total_sq += float(np.sum(sq * sq))
        n_done += m
    mean = total / mc.samples
    var = max(total_sq / mc.samples - mean * mean, 0.0) * mc.samples / (mc.samples - 1)
    return mean, math.sqrt(var / mc.samples)


def _su_objective_search(values_fn, lo: float, grid_points: int, refine_iters: int):
    """sup over sigma_SU in [lo, 0] of values_fn; returns (value, su_star)."""
    su = np.linspace(lo, 0.0, grid_points)
    vals = values_fn(su)
    j = int(np.argmax(vals))
    best_v, best_su = float(vals[j]), float(su[j])
    blo = su[max(j - 1, 0)]
    bhi = su[min(j + 1, grid_points - 1)]
    xs, vs = golden_max_vec(values_fn, np.array([blo]), np.array([bhi]), refine_iters)
    if float(vs[0]) > best_v:
        best_v, best_su = float(vs[0]), float(xs[0])
    return best_v, best_su


def _capacity_vals(sigma: float, power: float, su):
    s2 = sigma * sigma
    a = s2 + power + 2.0 * np.asarray(su, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (power * s2 - su * su) * (1.0 + a) / (s2 * a)
        out = 0.5 * np.log2(arg)
    return np.nan_to_num(out, nan=-np.inf, neginf=-np.inf)


def _alpha1_vals(sigma: float, power: float, su):
    s2 = sigma * sigma
    d = power + s2 + 2.0 * np.asarray(su, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = (power - su * su / s2) * (d + 1.0) / d
        out = 0.5 * np.log2(arg)
    return np.nan_to_num(out, nan=-np.inf, neginf=-np.inf)


def capacity(
    sigma: float, power: float, grid_points: int = 2001, refine_iters: int = 60
) -> tuple[float, float]:
    """Maximum rate C(P) with perfect recovery of X, and the optimizing sigma_SU.

    sup over sigma_SU in [-sigma*sqrt(P), 0] of
    (1/2) log2((P sigma^2 - sigma_SU^2)(1+sigma^2+P+2 sigma_SU)
               / (sigma^2 (sigma^2+P+2 sigma_SU))).
    """
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    if power <= 0:
        raise ParameterError("power must be > 0")
    return _su_objective_search(
        lambda su: _capacity_vals(sigma, power, su),
        -sigma * math.sqrt(power),
        grid_points,
        refine_iters,
    )


def achievable_rate_alpha1(
    sigma: float, power: float, grid_points: int = 2001, refine_iters: int = 60
) -> float:
    """Best rate of the alpha = 1 (perfect recovery) strategy over the power split.

    sup over sigma_SU in [-sigma*sqrt(P), 0] of
    (1/2) log2((P - sigma_SU^2/sigma^2)(P+sigma^2+2 sigma_SU+1)
               / (P+sigma^2+2 sigma_SU)); matches capacity().
    """
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    if power <= 0:
        raise ParameterError("power must be > 0")
    v, _ = _su_objective_search(
        lambda su: _alpha1_vals(sigma, power, su),
        -sigma * math.sqrt(power),
        grid_points,
        refine_iters,
    )
    return v


def _alpha1_best(sigma: float, power: float) -> tuple[float, float]:
    """(rate, sigma_SU*) of the alpha = 1 strategy."""
    return _su_objective_search(
        lambda su: _alpha1_vals(sigma, power, su),
        -sigma * math.sqrt(power),
        2001,
        60,
    )


def _alpha1_best_many(sigma: float, powers: np.ndarray, grid_points: int = 2001,
                      refine_iters: int = 60):
    """Vectorized (rate, sigma_SU*) of the alpha = 1 strategy per power."""
    flat = np.asarray(powers, dtype=float).ravel()
    lo = -sigma * np.sqrt(np.maximum(flat, 0.0))
    frac = np.linspace(0.0, 1.0, grid_points)
    su = lo[:, None] * (1.0 - frac[None, :])  # lo .. 0 per lane
    vals = _alpha1_vals(sigma, flat[:, None], su)
    j = np.argmax(vals, axis=1)
    rows = np.arange(flat.size)
    best_v = vals[rows, j]
    best_su = su[rows, j]
    blo = su[rows, np.maximum(j - 1, 0)]
    bhi = su[rows, np.minimum(j + 1, grid_points - 1)]
    ref_su, ref_v = golden_max_vec(
        lambda s: _alpha1_vals(sigma, flat, s), blo, bhi, refine_iters
    )
    take = ref_v > best_v
    return np.where(take, ref_v, best_v), np.where(take, ref_su, best_su)


def _const_min_over_alpha(t, p, dmax):
    """Exact constrained min of mmse over alpha with det(alpha) <= dmax.

    t, p, dmax: equal-shape arrays (p > 0 assumed valid where used).
    Returns (values, alphas); infeasible lanes get +inf.
    """
    t = np.asarray(t, dtype=float)
    p = np.asarray(p, dtype=float)
    dmax = np.asarray(dmax, dtype=float)
    T = t + p
    # det(alpha) = a2 alpha^2 + a1 alpha + a0
    a2 = t * (p + 1.0)
    a0 = p * (t + 1.0)
    pt = p * t
    disc = pt * pt - a2 * (a0 - dmax)
    with np.errstate(invalid="ignore", divide="ignore"):
        sq = np.sqrt(np.maximum(disc, 0.0))
        a2_safe = np.where(a2 > 0.0, a2, 1.0)
        alpha_lo = (pt - sq) / a2_safe
        alpha_hi = (pt + sq) / a2_safe
        # stationary points of N/det (quadratic: qa x^2 + 2 qb x + qc = 0)
        n2 = t * (T * T + (1.0 - T) * t)
        n1 = 2.0 * t * p * (1.0 - T)
        n0 = p * (T * T + (1.0 - T) * p)
        d2 = a2
        d1 = -2.0 * pt
        d0 = a0
        qa = n2 * d1 - n1 * d2
        qb = n2 * d0 - n0 * d2
        qc = n1 * d0 - n0 * d1
        sdisc = np.sqrt(np.maximum(qb * qb - qa * qc, 0.0))
        qa_ok = np.abs(qa) > 1e-300
        qa_safe = np.where(qa_ok, qa, 1.0)
        s1 = np.where(qa_ok, (-qb - sdisc) / qa_safe, np.nan)
        s2 = np.where(qa_ok, (-qb + sdisc) / qa_safe, np.nan)
        qb_ok = ~qa_ok & (np.abs(qb) > 1e-300)
        s_lin = np.where(qb_ok, -qc / np.where(qb_ok, 2.0 * qb, 1.0), np.nan)
        costa = p / (p + 1.0)

    best_v = np.full(T.shape, np.inf)
    best_a = np.full(T.shape, np.inf)
    ones = np.ones_like(T)
    # admission is per candidate: det(alpha) <= dmax is exactly "this alpha's
    # rate meets R" and is robust where the interval's discriminant underflows
    for cand in (alpha_lo, alpha_hi, s1, s2, s_lin, ones, costa):
        mmse, det = _lmmse_from_moments(t, p, cand)
        ok = np.isfinite(cand) & (p > 0.0) & (det <= dmax * (1.0 + 1e-15))
        v = np.where(ok, mmse, np.inf)
        better = (v < best_v) | ((v == best_v) & (cand < best_a) & ok)
        best_v = np.where(better, v, best_v)
        best_a = np.where(better, np.where(ok, cand, best_a), best_a)
    return best_v, best_a


def upper_bound_curve(
    sigma: float,
    powers: np.ndarray,
    rate: float,
    cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
):
    """Vectorized upper bound over an array of powers at fixed (sigma, rate).

    Returns (values, alpha_stars, beta_stars); alpha_star is NaN where the
    pure-linear (no coded part) strategy wins.
    """
    powers = np.asarray(powers, dtype=float)
    flat = powers.ravel()
    for p in flat:
        require_feasible(ProblemParams(sigma, float(p), rate))
    n = flat.size
    s2 = sigma * sigma
    rate_factor = math.pow(2.0, -2.0 * rate) * math.pow(2.0, 2.0 * RATE_TOL_BITS)

    bmax = np.minimum(1.0, np.sqrt(flat) / sigma)
    frac = np.linspace(0.0, 1.0, cfg.beta_points)
    beta = bmax[:, None] * frac[None, :]
    t, p = _split(sigma, flat[:, None], beta)
    p = np.maximum(p, 0.0)
    dmax = p * (p + t + 1.0) * rate_factor
    vals, alphas = _const_min_over_alpha(t, p, dmax)

    j = np.argmin(vals, axis=1)  # smallest beta on ties
    rows = np.arange(n)
    best_v = vals[rows, j]
    best_b = beta[rows, j]
    best_a = alphas[rows, j]

    blo = beta[rows, np.maximum(j - 1, 0)]
    bhi = beta[rows, np.minimum(j + 1, cfg.beta_points - 1)]

    def cell_min(bb):
        tt, pp = _split(sigma, flat, bb)
        pp = np.maximum(pp, 0.0)
        dd = pp * (pp + tt + 1.0) * rate_factor
        v, _ = _const_min_over_alpha(tt, pp, dd)
        return v

    ref_b, ref_v = golden_min_vec(cell_min, blo, bhi, cfg.refine_iters)
    tt, pp = _split(sigma, flat, ref_b)
    pp = np.maximum(pp, 0.0)
    _, ref_a = _const_min_over_alpha(tt, pp, pp * (pp + tt + 1.0) * rate_factor)

    take = (ref_v < best_v) | ((ref_v == best_v) & (ref_b < best_b))
    best_v = np.where(take, ref_v, best_v)
    best_b = np.where(take, ref_b, best_b)
    best_a = np.where(take, ref_a, best_a)

    if rate == 0.0:
        # pure-linear candidate: no coded part, estimate X = (1-beta)S from Y
        t_pl = s2 * (1.0 - bmax) ** 2
        v_pl = t_pl / (1.0 + t_pl)
        take = (v_pl < best_v) | ((v_pl == best_v) & (bmax < best_b))
        best_v = np.where(take, v_pl, best_v)
        best_b = np.where(take, bmax, best_b)
        best_a = np.where(take, np.nan, best_a)

    # perfect-recovery candidate: alpha = 1 at the best rate split
    pos = flat > 0.0
    if np.any(pos):
        r1 = np.full(n, -np.inf)
        su_star = np.zeros(n)
        r1[pos], su_star[pos] = _alpha1_best_many(sigma, flat[pos])
        b_star = np.clip(-su_star / s2, 0.0, bmax)
        use = pos & (r1 >= rate - RATE_TOL_BITS) & (
            (best_v > 0.0) | ((best_v == 0.0) & (b_star < best_b))
        )
        best_v = np.where(use, 0.0, best_v)
        best_b = np.where(use, b_star, best_b)
        best_a = np.where(use, 1.0, best_a)

    if not np.all(np.isfinite(best_v)):
        raise FeasibilityError(
            "no strategy meets the rate constraint; the constraint set is empty"
        )
    shape = powers.shape
    return best_v.reshape(shape), best_a.reshape(shape), best_b.reshape(shape)


def upper_bound_mmse(
    params: ProblemParams, cfg: UpperSearchConfig = DEFAULT_UPPER_CFG
) -> BoundResult:
    """Min of lmmse_x over the strategy family subject to dpc_rate >= rate.

    sigma_su_star reports the strategy's host-input correlation -beta* sigma^2.
    alpha_star is None when the pure-linear strategy wins.
    """
    require_feasible(params)
    v, a, b = upper_bound_curve(params.sigma, np.array([params.power]), params.rate, cfg)
    alpha_star = None if math.isnan(float(a[0])) else float(a[0])
    return BoundResult(
        value=float(v[0]),
        sigma_su_star=-float(b[0]) * params.sigma**2,
        alpha_star=alpha_star,
        beta_star=float(b[0]),
    )
