"""Grid and golden-section search helpers shared by the bound evaluators.

The golden-section routines return the best point actually *evaluated*, so
wrapping them around a coarse-grid incumbent can only improve (never replace)
the grid result. The vectorized variants run many independent brackets in
lockstep, one objective call per iteration over the whole lane array, which
keeps the inf-sup evaluations reduction-order independent and deterministic.
"""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def log_grid(lo_exp: float, hi_exp: float, n: int) -> np.ndarray:
    """n points log-spaced between 10**lo_exp and 10**hi_exp."""
    return np.power(10.0, np.linspace(lo_exp, hi_exp, n))


def pick_max(xs: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    """(x, value) of the maximum; exact value ties pick the smallest x."""
    m = np.max(vals)
    tied = np.where(vals == m, xs, np.inf)
    return float(np.min(tied)), float(m)


def pick_min(xs: np.ndarray, vals: np.ndarray) -> tuple[float, float]:
    """(x, value) of the minimum; exact value ties pick the smallest x."""
    m = np.min(vals)
    tied = np.where(vals == m, xs, np.inf)
    return float(np.min(tied)), float(m)


def golden_max_vec(f, lo, hi, iters: int):
    """Golden-section maximization over independent brackets [lo_i, hi_i].

    f maps an array of lane positions to an array of lane values. Returns the
    best (x, f(x)) evaluated per lane (initial probes included). Exact value
    ties resolve to the smaller x.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    h = hi - lo
    x1 = lo + INV_PHI_SQ * h
    x2 = lo + INV_PHI * h
    f1 = np.asarray(f(x1), dtype=float)
    f2 = np.asarray(f(x2), dtype=float)
    take1 = (f1 > f2) | ((f1 == f2) & (x1 <= x2))
    best_x = np.where(take1, x1, x2)
    best_f = np.where(take1, f1, f2)
    for _ in range(iters):
        left = f1 >= f2  # keep the left sub-bracket on ties (smaller-x bias)
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        h = hi - lo
        probe_left = lo + INV_PHI_SQ * h
        probe_right = lo + INV_PHI * h
        x_new = np.where(left, probe_left, probe_right)
        f_new = np.asarray(f(x_new), dtype=float)
        x1, x2 = np.where(left, probe_left, x2), np.where(left, x1, probe_right)
        f1, f2 = np.where(left, f_new, f2), np.where(left, f1, f_new)
        better = (f_new > best_f) | ((f_new == best_f) & (x_new < best_x))
        best_x = np.where(better, x_new, best_x)
        best_f = np.where(better, f_new, best_f)
    return best_x, best_f


def golden_min_vec(f, lo, hi, iters: int):
    """Golden-section minimization over independent brackets; see golden_max_vec."""
    x, v = golden_max_vec(lambda t: -np.asarray(f(t), dtype=float), lo, hi, iters)
    return x, -v


def golden_max(f, lo: float, hi: float, iters: int) -> tuple[float, float]:
    """Scalar golden-section maximization returning the best evaluated (x, f(x))."""
    xs, vs = golden_max_vec(
        lambda a: np.array([f(float(a[0]))]), np.array([lo]), np.array([hi]), iters
    )
    return float(xs[0]), float(vs[0])


def golden_min(f, lo: float, hi: float, iters: int) -> tuple[float, float]:
    x, v = golden_max(lambda t: -f(t), lo, hi, iters)
    return x, -v
