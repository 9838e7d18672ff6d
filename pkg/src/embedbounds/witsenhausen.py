"""Weighted-cost envelopes, ratio surfaces, power inversions, and rate sweeps.

At R = 0 the embedding problem is the vector Witsenhausen counterexample with
total cost J = k^2 P + MMSE. Minimizing k^2 P + bound(sigma, P) over P gives
the tangent-construction value of each bound on the optimal cost; surfaces of
the upper/lower cost ratio over (k, sigma) and of the MMSE-bound ratio over
(P, sigma) reproduce the headline constants (new-bound cost ratio < 1.3,
MMSE ratio < 1.5, legacy cost ratio 2 with its ridge at sigma^2 = (sqrt5-1)/2).

Ratio conventions are explicit: 0/0 -> 1 (both bounds tight at zero) and
positive/0 -> +inf, recorded as an inf sentinel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .achievability import DEFAULT_UPPER_CFG, UpperSearchConfig, upper_bound_curve
from .core import ParameterError, ProblemParams, require_feasible
from .lower_bounds import (
    DEFAULT_GAMMA_CFG,
    DEFAULT_SU_CFG,
    GammaSearchConfig,
    SigmaSuSearchConfig,
    lower_bound_curve,
    old_lower_bound,
)

LOWER_KINDS = ("new", "legacy")


@dataclass(frozen=True)
class PowerSweepConfig:
    """Log-spaced power grid (P = 0 prepended) for the weighted-cost minimum."""

    points: int = 400
    p_min: float = 1e-6
    refine_iters: int = 40  # golden iterations for the standalone minimum
    surface_refine_iters: int = 3  # parabolic-vertex iterations per surface cell

    def __post_init__(self):
        if self.points < 10:
            raise ParameterError("points must be >= 10")
        if not 0.0 < self.p_min:
            raise ParameterError("p_min must be > 0")


DEFAULT_POWER_CFG = PowerSweepConfig()


@dataclass(frozen=True)
class WeightedCostResult:
    """Minimized k^2 P + bound for both bounds, with the minimizing powers."""

    k: float
    j_lower: float
    j_upper: float
    p_star_lower: float
    p_star_upper: float


@dataclass
class SweepTable:
    """Rectangular sweep: per-cell lower/upper bound values, ratio, optimizers.

    Arrays are shaped (len(axis1), len(axis2)); optimizer entries are NaN
    where not applicable. This is the unit of CSV exchange.
    """

    axis1_name: str
    axis2_name: str
    axis1: np.ndarray
    axis2: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    ratio: np.ndarray
    sigma_su_star: np.ndarray
    gamma_star: np.ndarray
    alpha_star: np.ndarray
    beta_star: np.ndarray
    meta: dict = field(default_factory=dict)

    def max_finite_ratio(self) -> float:
        """Largest ratio cell, inf sentinels excluded."""
        finite = self.ratio[np.isfinite(self.ratio)]
        if finite.size == 0:
            raise ParameterError("no finite ratio cells")
        return float(np.max(finite))


RATIO_ZERO_EPS = 1e-15


def ratio_with_conventions(upper, lower):
    """upper/lower with 0/0 -> 1 and positive/0 -> +inf.

    Values with magnitude <= RATIO_ZERO_EPS count as zero: at parameter
    coincidences like P = sigma^2 the two bounds' exact zeros can differ by
    one floating-point ulp's worth of residual (~1e-26), and both are "tight
    at zero" there.
    """
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    up_zero = np.abs(upper) <= RATIO_ZERO_EPS
    lo_zero = np.abs(lower) <= RATIO_ZERO_EPS
    out = np.empty(np.broadcast(upper, lower).shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        np.divide(upper, lower, out=out, where=~lo_zero)
    out[lo_zero & up_zero] = 1.0
    out[lo_zero & ~up_zero] = np.inf
    return out


def _power_grid(k_min: float, sigma: float, cfg: PowerSweepConfig) -> np.ndarray:
    """P = 0 followed by log-spaced points up to max(100 sigma^2, 100/k_min^2)."""
    cap = max(100.0 * sigma * sigma, 100.0 / (k_min * k_min))
    grid = np.power(
        10.0, np.linspace(math.log10(cfg.p_min), math.log10(cap), cfg.points)
    )
    return np.concatenate(([0.0], grid))


class _BoundCurves:
    """Both bound curves over a power grid at fixed (sigma, rate = 0), with
    the per-point optimizing internals; evaluates extra powers on demand."""

    def __init__(
        self,
        sigma: float,
        lower_kind: str,
        su_cfg: SigmaSuSearchConfig,
        g_cfg: GammaSearchConfig,
        u_cfg: UpperSearchConfig,
    ):
        if lower_kind not in LOWER_KINDS:
            raise ParameterError(f"lower bound kind must be one of {LOWER_KINDS}")
        self.sigma = sigma
        self.lower_kind = lower_kind
        self.su_cfg = su_cfg
        self.g_cfg = g_cfg
        self.u_cfg = u_cfg

    def lower(self, powers):
        powers = np.asarray(powers, dtype=float)
        if self.lower_kind == "legacy":
            vals = old_lower_bound(self.sigma, powers)
            su = self.sigma * np.sqrt(powers)  # the loosening's fixed choices
            return np.asarray(vals, dtype=float), su, np.ones_like(powers)
        return lower_bound_curve(self.sigma, powers, 0.0, self.su_cfg, self.g_cfg)

    def upper(self, powers):
        powers = np.asarray(powers, dtype=float)
        return upper_bound_curve(self.sigma, powers, 0.0, self.u_cfg)


def _parabolic_refine(xa, xb, xc, fa, fb, fc, totals_fn, iters: int):
    """Successive parabolic-vertex minimization per lane.

    (xa, xb, xc) bracket the incumbent xb with known values (fa, fb, fc);
    totals_fn maps an array of P (one per lane) to objective values. Returns
    the best (P, value) per lane over all probes (incumbents included).
    """
    xa, xb, xc = xa.copy(), xb.copy(), xc.copy()
    fa, fb, fc = fa.copy(), fb.copy(), fc.copy()
    best_x = xb.copy()
    best_f = fb.copy()
    for _ in range(iters):
        with np.errstate(divide="ignore", invalid="ignore"):
            denom = (xb - xa) * (fb - fc) - (xb - xc) * (fb - fa)
            num = (xb - xa) ** 2 * (fb - fc) - (xb - xc) ** 2 * (fb - fa)
            v = xb - 0.5 * num / denom
        bad = ~np.isfinite(v) | (v <= np.minimum(xa, xc)) | (v >= np.maximum(xa, xc))
        v = np.where(bad, 0.5 * (xa + xc), v)
        v = np.where(v == xb, 0.5 * (xb + xc), v)  # force a fresh probe
        fv = totals_fn(v)
        better = fv < best_f
        best_x = np.where(better, v, best_x)
        best_f = np.where(better, fv, best_f)
        # keep a 3-point pattern around the incumbent
        left = v < xb
        repl = fv < fb
        xa = np.where(repl & ~left, xb, np.where(~repl & left, v, xa))
        xc = np.where(repl & left, xb, np.where(~repl & ~left, v, xc))
        fa = np.where(repl & ~left, fb, np.where(~repl & left, fv, fa))
        fc = np.where(repl & left, fb, np.where(~repl & ~left, fv, fc))
        xb = np.where(repl, v, xb)
        fb = np.where(repl, fv, fb)
    return best_x, best_f


def _min_cost_on_curve(k2, powers, curve_vals, eval_fn, refine_iters, mode):
    """Minimize k^2 P + bound(P) for many k at once over a shared curve.

    k2: (nk,) squared weights; curve_vals: bound values on powers; eval_fn
    maps P arrays to fresh bound values. mode 'parabolic' runs vectorized
    vertex steps (surface cells); 'golden' runs per-lane golden sections
    (standalone calls). Returns (j_values, p_stars).
    """
    totals = k2[:, None] * powers[None, :] + curve_vals[None, :]
    j = np.argmin(totals, axis=1)
    rows = np.arange(k2.size)
    grid_f = totals[rows, j]
    grid_x = powers[j]

    def totals_at(p_arr):
        return k2 * p_arr + eval_fn(p_arr)

    if refine_iters > 0 and mode == "parabolic":
        ja = np.maximum(j - 1, 0)
        jc = np.minimum(j + 1, powers.size - 1)
        ref_x, ref_f = _parabolic_refine(
            powers[ja], powers[j], powers[jc],
            totals[rows, ja], grid_f, totals[rows, jc],
            totals_at, refine_iters,
        )
    elif refine_iters > 0:
        lo = powers[np.maximum(j - 1, 0)]
        hi = powers[np.minimum(j + 1, powers.size - 1)]
        from .search import golden_min_vec

        ref_x, ref_f = golden_min_vec(totals_at, lo, hi, refine_iters)
    else:
        ref_x, ref_f = grid_x, grid_f

    take = ref_f < grid_f
    return np.where(take, ref_f, grid_f), np.where(take, ref_x, grid_x)


def weighted_cost(
    k: float,
    sigma: float,
    lower_kind: str = "new",
    cfg: PowerSweepConfig = DEFAULT_POWER_CFG,
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
) -> WeightedCostResult:
    """min over P of k^2 P + bound(sigma, P, R=0), for both bounds.

    Both bounds are minimized over the identical power grid (P = 0 plus the
    log-spaced sweep), with golden refinement around each incumbent.
    """
    if k <= 0:
        raise ParameterError("k must be > 0")
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    curves = _BoundCurves(sigma, lower_kind, su_cfg, g_cfg, u_cfg)
    powers = _power_grid(k, sigma, cfg)
    k2 = np.array([k * k])
    lv, _, _ = curves.lower(powers)
    uv, _, _ = curves.upper(powers)
    jl, pl = _min_cost_on_curve(
        k2, powers, lv, lambda p: curves.lower(p)[0], cfg.refine_iters, "golden"
    )
    ju, pu = _min_cost_on_curve(
        k2, powers, uv, lambda p: curves.upper(p)[0], cfg.refine_iters, "golden"
    )
    return WeightedCostResult(
        k=k,
        j_lower=float(jl[0]),
        j_upper=float(ju[0]),
        p_star_lower=float(pl[0]),
        p_star_upper=float(pu[0]),
    )


def _cost_column(sigma, k_grid, lower_kind, cfg, su_cfg, g_cfg, u_cfg):
    """One sigma column of the cost-ratio surface; returns per-k cell data."""
    curves = _BoundCurves(sigma, lower_kind, su_cfg, g_cfg, u_cfg)
    powers = _power_grid(float(np.min(k_grid)), sigma, cfg)
    k2 = k_grid * k_grid
    lv, _, _ = curves.lower(powers)
    uv, _, _ = curves.upper(powers)
    jl, pl = _min_cost_on_curve(
        k2, powers, lv, lambda p: curves.lower(p)[0], cfg.surface_refine_iters, "parabolic"
    )
    ju, pu = _min_cost_on_curve(
        k2, powers, uv, lambda p: curves.upper(p)[0], cfg.surface_refine_iters, "parabolic"
    )
    # the upper bound's minimizer is also a candidate for the lower bound's
    # minimum (pointwise dominance then forces j_lower <= j_upper cellwise)
    lv_at_pu, su_pu, g_pu = curves.lower(pu)
    at_pu = k2 * pu + lv_at_pu
    take = at_pu < jl
    jl = np.where(take, at_pu, jl)
    pl = np.where(take, pu, pl)
    _, su_l, g_l = curves.lower(pl)
    _, a_u, b_u = curves.upper(pu)
    return jl, ju, su_l, g_l, a_u, b_u


def cost_ratio_surface(
    k_grid,
    sigma_grid,
    lower_kind: str = "new",
    cfg: PowerSweepConfig = DEFAULT_POWER_CFG,
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
    threads: int = 1,
) -> SweepTable:
    """Ratio of upper/lower weighted-cost minima over a (k, sigma) grid."""
    k_grid = np.asarray(k_grid, dtype=float)
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    if np.any(k_grid <= 0) or np.any(sigma_grid <= 0):
        raise ParameterError("k and sigma grids must be positive")
    nk, ns = k_grid.size, sigma_grid.size
    lower = np.empty((nk, ns))
    upper = np.empty((nk, ns))
    su_s = np.empty((nk, ns))
    g_s = np.empty((nk, ns))
    a_s = np.empty((nk, ns))
    b_s = np.empty((nk, ns))

    def work(i):
        return _cost_column(
            float(sigma_grid[i]), k_grid, lower_kind, cfg, su_cfg, g_cfg, u_cfg
        )

    results = _run_columns(work, ns, threads)
    for i, (jl, ju, su_l, g_l, a_u, b_u) in enumerate(results):
        lower[:, i] = jl
        upper[:, i] = ju
        su_s[:, i] = su_l
        g_s[:, i] = g_l
        a_s[:, i] = a_u
        b_s[:, i] = b_u
    return SweepTable(
        axis1_name="k",
        axis2_name="sigma",
        axis1=k_grid,
        axis2=sigma_grid,
        lower=lower,
        upper=upper,
        ratio=ratio_with_conventions(upper, lower),
        sigma_su_star=su_s,
        gamma_star=g_s,
        alpha_star=a_s,
        beta_star=b_s,
        meta={"lower_kind": lower_kind, "rate": "0"},
    )


def mmse_ratio_surface(
    p_grid,
    sigma_grid,
    rate: float = 0.0,
    lower_kind: str = "new",
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
    threads: int = 1,
) -> SweepTable:
    """Ratio of upper/lower MMSE bounds over a (P, sigma) grid at fixed rate."""
    p_grid = np.asarray(p_grid, dtype=float)
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    if np.any(p_grid < 0) or np.any(sigma_grid <= 0):
        raise ParameterError("grids must be positive")
    for p in p_grid:
        require_feasible(ProblemParams(float(sigma_grid[0]), float(p), rate))
    np_, ns = p_grid.size, sigma_grid.size
    lower = np.empty((np_, ns))
    upper = np.empty((np_, ns))
    su_s = np.empty((np_, ns))
    g_s = np.empty((np_, ns))
    a_s = np.empty((np_, ns))
    b_s = np.empty((np_, ns))

    def work(i):
        curves = _BoundCurves(float(sigma_grid[i]), lower_kind, su_cfg, g_cfg, u_cfg)
        if rate != 0.0:
            lv, su_l, g_l = (
                lower_bound_curve(float(sigma_grid[i]), p_grid, rate, su_cfg, g_cfg)
                if lower_kind == "new"
                else curves.lower(p_grid)
            )
            uv, a_u, b_u = upper_bound_curve(float(sigma_grid[i]), p_grid, rate, u_cfg)
        else:
            lv, su_l, g_l = curves.lower(p_grid)
            uv, a_u, b_u = curves.upper(p_grid)
        return lv, uv, su_l, g_l, a_u, b_u

    results = _run_columns(work, ns, threads)
    for i, (lv, uv, su_l, g_l, a_u, b_u) in enumerate(results):
        lower[:, i] = lv
        upper[:, i] = uv
        su_s[:, i] = su_l
        g_s[:, i] = g_l
        a_s[:, i] = a_u
        b_s[:, i] = b_u
    return SweepTable(
        axis1_name="power",
        axis2_name="sigma",
        axis1=p_grid,
        axis2=sigma_grid,
        lower=lower,
        upper=upper,
        ratio=ratio_with_conventions(upper, lower),
        sigma_su_star=su_s,
        gamma_star=g_s,
        alpha_star=a_s,
        beta_star=b_s,
        meta={"lower_kind": lower_kind, "rate": repr(rate)},
    )


def _run_columns(work, n: int, threads: int):
    if threads <= 1:
        return [work(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(work, range(n)))


def power_for_mmse_many(
    sigma: float,
    targets,
    rate: float = 0.0,
    bound_kind: str = "lower",
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
    grid_points: int = 600,
) -> np.ndarray:
    """power_for_mmse for many targets at one sigma, sharing the bound curve.

    The curve and its running-min envelope are computed once; the per-target
    bisections then run in lockstep (one bound evaluation per iteration over
    all unconverged targets).
    """
    targets = np.asarray(targets, dtype=float)
    flat = targets.ravel()
    if np.any(flat < 0):
        raise ParameterError("target distortion must be >= 0")
    if bound_kind not in ("lower", "upper"):
        raise ParameterError("bound_kind must be 'lower' or 'upper'")
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")

    if bound_kind == "lower":
        evaluate = lambda p: lower_bound_curve(sigma, p, rate, su_cfg, g_cfg)[0]
    else:
        evaluate = lambda p: upper_bound_curve(sigma, p, rate, u_cfg)[0]

    out = np.empty(flat.size)
    zero_power_value = sigma * sigma / (sigma * sigma + 1.0)
    pending = np.ones(flat.size, dtype=bool)
    if rate == 0.0:
        free = flat >= zero_power_value
        out[free] = 0.0
        pending &= ~free

    p_floor = math.pow(2.0, 2.0 * rate) - 1.0
    if np.any(pending) and p_floor > 0:
        at_floor = float(evaluate(np.array([p_floor]))[0])
        hit = pending & (at_floor <= flat)
        out[hit] = p_floor
        pending &= ~hit

    if np.any(pending):
        t_min = float(np.min(flat[pending]))
        lo_grid = max(p_floor, 1e-6)
        hi = max(4.0 * sigma * sigma, 4.0 * lo_grid, 1.0)
        for _ in range(60):
            if float(evaluate(np.array([hi]))[0]) <= t_min:
                break
            hi *= 10.0
        else:
            raise ParameterError(
                f"target {t_min} unreachable at any searched power"
            )
        grid = np.power(
            10.0, np.linspace(math.log10(lo_grid), math.log10(hi), grid_points)
        )
        if p_floor > 0:
            grid = np.concatenate(([p_floor], grid[grid > p_floor]))
        env = np.minimum.accumulate(evaluate(grid))

        idx = np.searchsorted(-env, -flat[pending], side="left")
        idx = np.minimum(idx, env.size - 1)
        bad = env[idx] > flat[pending]
        if np.any(bad):
            raise ParameterError("envelope never meets the target on the grid")
        lo_b = np.where(
            idx > 0, grid[np.maximum(idx - 1, 0)], p_floor if rate > 0 else 0.0
        )
        hi_b = grid[idx]
        t_pend = flat[pending]
        done = hi_b - lo_b <= 1e-9 * (1.0 + hi_b)
        for _ in range(80):
            if np.all(done):
                break
            mid = np.where(done, hi_b, 0.5 * (lo_b + hi_b))
            ev = evaluate(mid)
            meets = ev <= t_pend
            hi_b = np.where(~done & meets, mid, hi_b)
            lo_b = np.where(~done & ~meets, mid, lo_b)
            done = hi_b - lo_b <= 1e-9 * (1.0 + hi_b)
        out[pending] = hi_b
    return out.reshape(targets.shape)


def power_for_mmse(
    sigma: float,
    target: float,
    rate: float = 0.0,
    bound_kind: str = "lower",
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
    grid_points: int = 600,
) -> float:
    """Least power whose bound-vs-P running-min envelope meets the target.

    bound_kind 'lower' inverts the lower bound (a lower bound on the power
    required for the target distortion); 'upper' inverts the upper bound (an
    upper bound on the sufficient power). Monotonicity in P is not assumed:
    the curve is converted to a nonincreasing envelope by running minimum,
    and the first envelope crossing is bisected to tolerance 1e-9 (1 + P).
    At R = 0 a target at or above sigma^2/(sigma^2+1) needs no input and
    returns P = 0; at R > 0 the search starts at the power floor 2^{2R} - 1.
    """
    return float(
        power_for_mmse_many(
            sigma, np.array([target]), rate, bound_kind, su_cfg, g_cfg, u_cfg,
            grid_points,
        )[0]
    )


def mmse_vs_rate(
    sigma: float,
    power: float,
    rates,
    su_cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    g_cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
    u_cfg: UpperSearchConfig = DEFAULT_UPPER_CFG,
) -> SweepTable:
    """Lower and upper MMSE bounds versus rate at fixed (sigma, power)."""
    rates = np.asarray(rates, dtype=float)
    for r in rates:
        require_feasible(ProblemParams(sigma, power, float(r)))
    n = rates.size
    lower = np.empty((n, 1))
    upper = np.empty((n, 1))
    su_s = np.empty((n, 1))
    g_s = np.empty((n, 1))
    a_s = np.empty((n, 1))
    b_s = np.empty((n, 1))
    p_arr = np.array([power])
    for i, r in enumerate(rates):
        lv, su_l, g_l = lower_bound_curve(sigma, p_arr, float(r), su_cfg, g_cfg)
        uv, a_u, b_u = upper_bound_curve(sigma, p_arr, float(r), u_cfg)
        lower[i, 0] = lv[0]
        upper[i, 0] = uv[0]
        su_s[i, 0] = su_l[0]
        g_s[i, 0] = g_l[0]
        a_s[i, 0] = a_u[0]
        b_s[i, 0] = b_u[0]
    return SweepTable(
        axis1_name="rate",
        axis2_name="power",
        axis1=rates,
        axis2=np.array([power]),
        lower=lower,
        upper=upper,
        ratio=ratio_with_conventions(upper, lower),
        sigma_su_star=su_s,
        gamma_star=g_s,
        alpha_star=a_s,
        beta_star=b_s,
        meta={"sigma": repr(sigma), "power": repr(power)},
    )
