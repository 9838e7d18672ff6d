"""Inf-sup lower bound on MMSE(P,R) and the legacy lower bound.

The bound at a point (sigma, P, R) is

    inf_{sigma_SU} sup_{gamma>0} (1/gamma^2) *
        ((sqrt(sigma^2 4^R / (1+sigma^2+P+2*sigma_SU))
          - sqrt((1-gamma)^2 sigma^2 + gamma^2 P - 2 gamma (1-gamma) sigma_SU))^+)^2

with sigma_SU ranging over sigma_su_range(params). The second radicand is
evaluated in exactly this three-term form (not as an expanded quadratic in
gamma), which avoids catastrophic cancellation near gamma = 1 where the sup
often sits. Writing it as q(gamma) = a*gamma^2 - 2*b*gamma + c with

    a = sigma^2 + P + 2*sigma_SU,   b = sigma^2 + sigma_SU,   c = sigma^2,

the inner sup has closed-form stationary candidates: on the smooth branch the
optimality condition (c - b*gamma)/sqrt(q) = A (A^2 = c*4^R/(1+a)) squares to

    (b^2 - A^2 a) gamma^2 - 2 b (c - A^2) gamma + c (c - A^2) = 0,

whose discriminant A^2 (c - A^2)(c a - b^2) is nonnegative on the feasible
range (c - A^2 >= 0 is rate feasibility, c a - b^2 = sigma^2 P - sigma_SU^2 >= 0
is Cauchy-Schwarz). Both roots, gamma = 1 (the legacy-bound choice, so the
sup provably dominates it), the converse-proof candidate gamma* = b/a, a
coarse log-spaced grid, and golden-section refinement around the grid argmax
are all evaluated; the sup is their max. Every evaluated gamma yields a valid
bound, so the reported value is always a true lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BoundResult,
    ParameterError,
    ProblemParams,
    pos_part,
    require_feasible,
    sigma_su_range,
)
from .search import golden_max_vec, golden_min_vec, log_grid

# the gamma* = b/a candidate is dropped when a = sigma^2 + P + 2 sigma_SU is
# below this (it can only trigger at sigma_SU = -sigma*sqrt(P) with
# P = sigma^2, where the integrand itself is exactly 0 at R = 0 and the
# corner lies outside the feasible range at R > 0).
A_GUARD = 1e-12

# Radicand clamp: q in [-RADICAND_RTOL * scale, 0) snaps to 0, where scale is
# the magnitude of q's terms; larger negatives are mathematically impossible
# and raise.
RADICAND_RTOL = 1e-12

_CHUNK = 64  # power-axis chunk so (chunk x su_grid x gamma_grid) slabs stay small


@dataclass(frozen=True)
class GammaSearchConfig:
    """Search window and effort for the inner sup over gamma.

    The closed-form stationary candidates carry the accuracy; the coarse grid
    and golden refinement are a safety net against algebra edge cases (e.g.
    the sup approached only as gamma -> 0 at the rate-feasibility boundary).
    """

    log_gamma_lo: float = -6.0
    log_gamma_hi: float = 6.0
    coarse_points: int = 17
    refine_iters: int = 8

    def __post_init__(self):
        if not self.log_gamma_lo < self.log_gamma_hi:
            raise ParameterError("log_gamma_lo must be < log_gamma_hi")
        if self.coarse_points < 3:
            raise ParameterError("coarse_points must be >= 3")
        if self.refine_iters < 0:
            raise ParameterError("refine_iters must be >= 0")


@dataclass(frozen=True)
class SigmaSuSearchConfig:
    """Grid size and refinement effort for the outer inf over sigma_SU."""

    grid_points: int = 2001
    refine_iters: int = 40

    def __post_init__(self):
        if self.grid_points < 3:
            raise ParameterError("grid_points must be >= 3")
        if self.refine_iters < 0:
            raise ParameterError("refine_iters must be >= 0")


DEFAULT_GAMMA_CFG = GammaSearchConfig()
DEFAULT_SU_CFG = SigmaSuSearchConfig()


def _inner_vals(c, power, su, A, gamma):
    """Elementwise bound integrand; all arguments broadcastable arrays.

    The radicand (1-g)^2 c + g^2 P - 2 g (1-g) su is kept in its three-term
    form for numerical stability; tiny FP negatives are clamped to 0 and
    impossible negatives raise.
    """
    u = 1.0 - gamma
    with np.errstate(over="ignore"):
        t1 = u * u * c
        t2 = gamma * gamma * power
        t3 = (2.0 * gamma) * u * su
        q = np.asarray(t1 + t2, dtype=float)
        q -= t3
        if np.min(q) < 0.0:  # rare: clamp FP noise, reject real negatives
            scale = t1 + t2 + np.abs(t3)
            if np.any(q < -RADICAND_RTOL * scale):
                raise AssertionError(
                    "second radicand negative beyond floating-point tolerance; "
                    "this contradicts its nonnegativity on the feasible range"
                )
            q = np.where(q < 0.0, 0.0, q)
        np.sqrt(q, out=q)
        np.subtract(A, q, out=q)
        np.maximum(q, 0.0, out=q)
        q /= gamma
        q *= q
        return q


def _sup_gamma(c, power, su, rate, cfg: GammaSearchConfig):
    """sup over gamma>0 of the integrand, per lane.

    c (sigma^2) is scalar; power and su are equal-shape arrays. Returns
    (values, gamma_stars) of that shape. Exact value ties resolve to the
    smallest gamma.
    """
    su = np.asarray(su, dtype=float)
    shape = su.shape
    su = su.ravel()
    power = np.broadcast_to(np.asarray(power, dtype=float), shape).ravel()
    a = c + power + 2.0 * su
    b = c + su
    Asq = c * np.power(2.0, 2.0 * rate) / (1.0 + a)
    A = np.sqrt(Asq)

    grid = log_grid(cfg.log_gamma_lo, cfg.log_gamma_hi, cfg.coarse_points)
    vals = _inner_vals(c, power[:, None], su[:, None], A[:, None], grid[None, :])
    j = np.argmax(vals, axis=1)  # first occurrence = smallest gamma on ties
    best_f = vals[np.arange(su.size), j]
    best_g = grid[j]

    log_pts = np.linspace(cfg.log_gamma_lo, cfg.log_gamma_hi, cfg.coarse_points)
    lo = log_pts[np.maximum(j - 1, 0)]
    hi = log_pts[np.minimum(j + 1, cfg.coarse_points - 1)]
    ref_lg, _ = golden_max_vec(
        lambda lg: _inner_vals(c, power, su, A, np.power(10.0, lg)),
        lo,
        hi,
        cfg.refine_iters,
    )
    ref_g = np.power(10.0, ref_lg)

    # analytic candidates: gamma = 1, the converse-proof gamma* = b/a, and the
    # two stationary roots of the squared optimality condition
    with np.errstate(divide="ignore", invalid="ignore"):
        g_star = np.where((a > A_GUARD) & (b > 0.0), b / np.maximum(a, A_GUARD), np.nan)
        cma = pos_part(c - Asq)
        cab = pos_part(c * a - b * b)
        sq = np.sqrt(Asq * cma * cab)
        d2 = b * b - Asq * a
        d2_ok = np.abs(d2) > 1e-300
        d2_safe = np.where(d2_ok, d2, 1.0)
        r_plus = np.where(d2_ok, (b * cma + sq) / d2_safe, np.nan)
        r_minus = np.where(d2_ok, (b * cma - sq) / d2_safe, np.nan)
        b_ok = ~d2_ok & (np.abs(b) > 0.0)
        r_lin = np.where(b_ok, c / np.where(b_ok, 2.0 * b, 1.0), np.nan)

    for g_cand in (ref_g, np.ones_like(su), g_star, r_plus, r_minus, r_lin):
        ok = np.isfinite(g_cand) & (g_cand > 0.0)
        g_safe = np.where(ok, g_cand, 1.0)
        f_cand = np.where(ok, _inner_vals(c, power, su, A, g_safe), -np.inf)
        better = (f_cand > best_f) | ((f_cand == best_f) & (g_safe < best_g) & ok)
        best_f = np.where(better, f_cand, best_f)
        best_g = np.where(better, g_safe, best_g)

    return best_f.reshape(shape), best_g.reshape(shape)


def lb_inner(params: ProblemParams, sigma_su: float, gamma: float) -> float:
    """The bound integrand at a single (sigma_SU, gamma) point.

    Raises ParameterError for gamma <= 0, sigma_SU outside the feasible
    interval, or sigma^2+P+2*sigma_SU below the singularity guard.
    """
    if not gamma > 0.0:
        raise ParameterError(f"gamma must be > 0, got {gamma}")
    rng = sigma_su_range(params)
    tol = 1e-9 * (1.0 + abs(rng.lo) + abs(rng.hi))
    if not rng.contains(sigma_su, tol=tol):
        raise ParameterError(
            f"sigma_su {sigma_su} outside feasible range [{rng.lo}, {rng.hi}]"
        )
    c = params.sigma**2
    a = c + params.power + 2.0 * sigma_su
    A = np.sqrt(c * 2.0 ** (2.0 * params.rate) / (1.0 + a))
    return float(_inner_vals(c, params.power, sigma_su, A, float(gamma)))


def lb_sup_gamma(
    params: ProblemParams,
    sigma_su: float,
    cfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
) -> tuple[float, float]:
    """sup over gamma > 0 of lb_inner at fixed sigma_SU. Returns (value, gamma*)."""
    lb_inner(params, sigma_su, 1.0)  # domain validation
    v, g = _sup_gamma(
        params.sigma**2,
        np.array([params.power]),
        np.array([sigma_su]),
        params.rate,
        cfg,
    )
    return float(v[0]), float(g[0])


def lower_bound_curve(
    sigma: float,
    powers,
    rate: float,
    cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    gcfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
):
    """Vectorized lower bound over an array of powers at fixed (sigma, rate).

    Every power must be feasible for the rate. Returns float arrays
    (values, sigma_su_stars, gamma_stars) aligned with powers.
    """
    powers = np.asarray(powers, dtype=float)
    flat = powers.ravel()
    for p in flat:
        require_feasible(ProblemParams(sigma, float(p), rate))

    n = flat.size
    grid_v = np.empty(n)
    grid_su = np.empty(n)
    grid_g = np.empty(n)
    blo = np.empty(n)
    bhi = np.empty(n)

    c = sigma * sigma
    hi_all = sigma * np.sqrt(flat)
    lo_all = np.maximum(-hi_all, (np.power(2.0, 2.0 * rate) - 1.0 - flat - c) / 2.0)
    lo_all = np.minimum(lo_all, hi_all)
    frac = np.linspace(0.0, 1.0, cfg.grid_points)

    # stage 1: chunked sigma_SU grid inf (chunking bounds slab memory)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        p = flat[sl]
        su = lo_all[sl][:, None] + frac[None, :] * (hi_all - lo_all)[sl][:, None]
        vals, gammas = _sup_gamma(c, p[:, None], su, rate, gcfg)

        j = np.argmin(vals, axis=1)  # first occurrence = smallest sigma_SU
        rows = np.arange(p.size)
        grid_v[sl] = vals[rows, j]
        grid_su[sl] = su[rows, j]
        grid_g[sl] = gammas[rows, j]
        blo[sl] = su[rows, np.maximum(j - 1, 0)]
        bhi[sl] = su[rows, np.minimum(j + 1, cfg.grid_points - 1)]

    # stage 2: golden refinement around every incumbent, all lanes at once
    def sup_at(su_pts):
        v, _ = _sup_gamma(c, flat, su_pts, rate, gcfg)
        return v

    ref_su, ref_v = golden_min_vec(sup_at, blo, bhi, cfg.refine_iters)
    _, ref_g = _sup_gamma(c, flat, ref_su, rate, gcfg)

    take_ref = (ref_v < grid_v) | ((ref_v == grid_v) & (ref_su < grid_su))
    values = np.where(take_ref, ref_v, grid_v)
    su_stars = np.where(take_ref, ref_su, grid_su)
    g_stars = np.where(take_ref, ref_g, grid_g)

    # stage 3: exact zero detection. The bound is 0 iff some sigma_SU makes
    # the inner term nonpositive for all gamma, i.e. A^2 <= min_gamma q, which
    # rearranges to the perfect-recovery rate objective reaching R. Using the
    # same detector as the upper bound's alpha = 1 candidate keeps the two
    # bounds' zero sets identical, so ratio conventions stay consistent.
    from .achievability import RATE_TOL_BITS, _alpha1_best_many

    pos = flat > 0.0
    if np.any(pos):
        r1 = np.full(n, -np.inf)
        su0 = np.zeros(n)
        r1[pos], su0[pos] = _alpha1_best_many(sigma, flat[pos])
        zero = pos & (r1 >= rate - RATE_TOL_BITS)
        if np.any(zero):
            a0 = c + flat + 2.0 * su0
            g0 = np.where(a0 > A_GUARD, (c + su0) / np.maximum(a0, A_GUARD), 1.0)
            values = np.where(zero, 0.0, values)
            su_stars = np.where(zero, su0, su_stars)
            g_stars = np.where(zero, np.where(g0 > 0.0, g0, 1.0), g_stars)

    shape = powers.shape
    return values.reshape(shape), su_stars.reshape(shape), g_stars.reshape(shape)


def lower_bound_mmse(
    params: ProblemParams,
    cfg: SigmaSuSearchConfig = DEFAULT_SU_CFG,
    gcfg: GammaSearchConfig = DEFAULT_GAMMA_CFG,
) -> BoundResult:
    """Inf-sup lower bound on MMSE(P,R) with the optimizing internals.

    The inf runs over a uniform sigma_SU grid (endpoints always included)
    plus golden refinement around the incumbent; each sup over gamma is
    evaluated as described in the module docstring.
    """
    require_feasible(params)
    v, su, g = lower_bound_curve(
        params.sigma, np.array([params.power]), params.rate, cfg, gcfg
    )
    rng = sigma_su_range(params)
    su_star = float(np.clip(su[0], rng.lo, rng.hi))
    return BoundResult(value=float(v[0]), sigma_su_star=su_star, gamma_star=float(g[0]))


def old_lower_bound(sigma, power):
    """Legacy lower bound ((sqrt(sigma^2/(sigma^2+P+2 sigma sqrt(P)+1)) - sqrt(P))^+)^2.

    This is the gamma = 1, sigma_SU = sigma*sqrt(P) loosening of the inf-sup
    bound. Accepts scalars or arrays.
    """
    sigma = np.asarray(sigma, dtype=float)
    power = np.asarray(power, dtype=float)
    if np.any(sigma <= 0):
        raise ParameterError("sigma must be > 0")
    if np.any(power < 0):
        raise ParameterError("power must be >= 0")
    s2 = sigma * sigma
    root = np.sqrt(s2 / (s2 + power + 2.0 * sigma * np.sqrt(power) + 1.0))
    out = pos_part(root - np.sqrt(power)) ** 2
    return float(out) if out.ndim == 0 else out
