"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Criteria 1-3 drive the CLI exactly as a user would; the rest call the
library surface directly. Criterion 3's legacy half is expected to fail; see
the assertion message for the analysis.
"""

import math
import time

import numpy as np
import pytest

from embedbounds import (
    FeasibilityError,
    McConfig,
    ProblemParams,
    StrategyParams,
    achievable_rate_alpha1,
    capacity,
    feasible,
    lmmse_x,
    lower_bound_mmse,
    mc_lmmse_check,
    old_lower_bound,
    upper_bound_mmse,
)
from embedbounds.cli import read_sweep_csv, run
from embedbounds.witsenhausen import mmse_ratio_surface

from oracles import lower_bound_brute, upper_bound_brute

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT_GOLDEN = math.sqrt(GOLDEN)


def report(num, ok, detail):
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


@pytest.mark.slow
def test_criterion_1_new_cost_ratio(tmp_path):
    out = tmp_path / "cost_new.csv"
    t0 = time.time()
    code = run([
        "cost-ratio", "--bound", "new", "--kmin", "1e-2", "--kmax", "1e2",
        "--smin", "1e-2", "--smax", "1e2", "--n", "81", "--out", str(out),
    ])
    elapsed = time.time() - t0
    assert code == 0
    with open(out) as fh:
        table = read_sweep_csv(fh)
    m = table.max_finite_ratio()
    report(
        1,
        m <= 1.326 and elapsed < 300.0,
        f"new-bound 81x81 cost ratio max = {m:.6f} (<= 1.326), {elapsed:.0f}s (< 300s)",
    )


@pytest.mark.slow
def test_criterion_2_legacy_cost_ratio(tmp_path):
    out = tmp_path / "cost_legacy.csv"
    code = run([
        "cost-ratio", "--bound", "legacy", "--kmin", "1e-2", "--kmax", "1e2",
        "--smin", "1e-2", "--smax", "1e2", "--n", "81", "--out", str(out),
    ])
    assert code == 0
    with open(out) as fh:
        table = read_sweep_csv(fh)
    m = table.max_finite_ratio()
    in_range = 1.90 <= m <= 2.05
    # ridge location: some small-k column's argmax sigma has sigma^2 near the
    # golden ratio
    small_k = table.axis1 <= 0.1
    best_rel = np.inf
    for i in np.flatnonzero(small_k):
        j = int(np.argmax(np.where(np.isfinite(table.ratio[i]), table.ratio[i], -1.0)))
        best_rel = min(best_rel, abs(table.axis2[j] ** 2 - GOLDEN) / GOLDEN)
    report(
        2,
        in_range and best_rel < 0.15,
        f"legacy max = {m:.4f} (in [1.90, 2.05]); ridge sigma^2 rel err = {best_rel:.3f} (< 0.15)",
    )


@pytest.mark.slow
def test_criterion_3_new_mmse_ratio(tmp_path):
    out = tmp_path / "mmse_new.csv"
    code = run([
        "mmse-ratio", "--bound", "new", "--rate", "0", "--pmin", "1e-2",
        "--pmax", "1e1", "--smin", "1e-1", "--smax", "1e1", "--n", "61",
        "--out", str(out),
    ])
    assert code == 0
    with open(out) as fh:
        table = read_sweep_csv(fh)
    m = table.max_finite_ratio()
    report(3, m <= 1.53, f"new-bound 61x61 MMSE ratio max = {m:.4f} (<= 1.53)")


@pytest.mark.slow
def test_criterion_3_legacy_divergence():
    # Faithful implementation of the stated check (module example grids:
    # log10 P in [-1,1] vs [-2,1] at 0.05/decade, sigma in [-1,1] with 61
    # points). Expected to FAIL: the legacy bound crosses zero quadratically
    # along a curve P_z(sigma) running through both P ranges, so the max
    # finite ratio is set by how close a grid point happens to land to the
    # crossing. The cell (P = 10^-0.4, sigma = 10^(1/6)) lies ~4e-4 from its
    # crossing (ratio ~ 4.3e5), belongs to both ranges, and is hit exactly by
    # both grids, so the two maxes tie exactly and "strictly increases" is
    # false. The divergence itself shows up as +inf sentinel cells (upper > 0
    # where legacy = 0), which the new-bound table never has.
    s = np.power(10.0, np.linspace(-1, 1, 61))
    base = mmse_ratio_surface(np.power(10.0, np.linspace(-1, 1, 41)), s, 0.0, "legacy")
    ext = mmse_ratio_surface(np.power(10.0, np.linspace(-2, 1, 61)), s, 0.0, "legacy")
    m_base = base.max_finite_ratio()
    m_ext = ext.max_finite_ratio()
    n_inf_base = int(np.isinf(base.ratio).sum())
    n_inf_ext = int(np.isinf(ext.ratio).sum())
    print(
        f"\n  diagnostic: legacy inf-sentinel cells {n_inf_base} -> {n_inf_ext}; "
        f"new-bound tables have none (divergence evidence)"
    )
    report(
        3.5,
        m_ext > m_base,
        f"legacy max finite ratio {m_base:.6g} -> {m_ext:.6g} when P range extends "
        "downward a decade (strict increase required; ties on the shared "
        "near-crossing cell, see ledger)",
    )


def test_criterion_4_capacity_tightness():
    rng = np.random.default_rng(20240817)
    worst_gap = 0.0
    for _ in range(100):
        s = float(rng.uniform(0.1, 10.0))
        p = float(rng.uniform(0.1, 10.0))
        c, _ = capacity(s, p)
        r1 = achievable_rate_alpha1(s, p)
        worst_gap = max(worst_gap, abs(c - r1))
        assert c <= 0.5 * math.log2(1.0 + p) + 1e-12
    report(4, worst_gap <= 1e-9, f"|capacity - alpha1 rate| worst = {worst_gap:.2e} (<= 1e-9)")


def test_criterion_5_perfect_recovery_crossover():
    rng = np.random.default_rng(99)
    checked = 0
    worst = 0.0
    while checked < 20:
        s = float(rng.uniform(0.1, 10.0))
        p = float(rng.uniform(0.1, 10.0))
        c, _ = capacity(s, p)
        if c < 0.05:  # no crossover to bracket when perfect recovery needs R < 0
            continue
        lo, hi = 0.0, 0.5 * math.log2(1.0 + p) * (1.0 - 1e-12)
        if upper_bound_mmse(ProblemParams(s, p, hi)).value <= 1e-9:
            lo = hi
        else:
            while hi - lo > 1e-4:
                mid = 0.5 * (lo + hi)
                if upper_bound_mmse(ProblemParams(s, p, mid)).value > 1e-9:
                    hi = mid
                else:
                    lo = mid
        worst = max(worst, max(lo - c, c - hi, 0.0))
        checked += 1
    report(5, worst <= 1e-4, f"crossover brackets capacity within {worst:.2e} (<= 1e-4)")


def test_criterion_6_p0_tightness():
    worst = 0.0
    for s in (0.1, 1.0, 10.0):
        expect = s * s / (s * s + 1.0)
        params = ProblemParams(s, 0.0, 0.0)
        worst = max(
            worst,
            abs(lower_bound_mmse(params).value - expect),
            abs(upper_bound_mmse(params).value - expect),
        )
    report(6, worst <= 1e-12, f"P=0: |bound - sigma^2/(sigma^2+1)| worst = {worst:.2e} (<= 1e-12)")


def test_criterion_7_feasibility_boundary():
    ok = feasible(ProblemParams(1.0, 1.0, 0.5))
    lower_bound_mmse(ProblemParams(1.0, 1.0, 0.5))
    upper_bound_mmse(ProblemParams(1.0, 1.0, 0.5))
    below_raises = False
    try:
        lower_bound_mmse(ProblemParams(1.0, 1.0 - 1e-6, 0.5))
    except FeasibilityError:
        below_raises = True
    try:
        upper_bound_mmse(ProblemParams(1.0, 1.0 - 1e-6, 0.5))
        below_raises = False
    except FeasibilityError:
        pass
    report(7, ok and below_raises,
           "bounds evaluable at P = 1, R = 0.5; P = 1 - 1e-6 raises FeasibilityError")


@pytest.mark.slow
def test_criterion_8_dominance():
    rng = np.random.default_rng(4242)
    worst = 0.0
    for _ in range(10_000):
        s = float(rng.uniform(0.05, 20.0))
        p = float(rng.uniform(0.0, 20.0))
        new = lower_bound_mmse(ProblemParams(s, p, 0.0)).value
        old = float(old_lower_bound(s, p))
        worst = max(worst, old - new)
    report(8, worst <= 1e-12, f"legacy - new worst = {worst:.2e} (<= 1e-12) on 1e4 points")


def test_criterion_9_lmmse_oracle():
    rng = np.random.default_rng(31415)
    worst_sigmas = 0.0
    for _ in range(20):
        s = float(rng.uniform(0.2, 5.0))
        p = float(rng.uniform(0.2, 5.0))
        b = float(rng.uniform(0.0, 0.9)) * min(1.0, math.sqrt(p) / s)
        a = float(rng.uniform(-0.5, 1.5))
        sp = StrategyParams(a, b)
        closed = lmmse_x(s, p, sp)
        est, se = mc_lmmse_check(s, p, sp, McConfig(1_000_000, int(rng.integers(1 << 31))))
        worst_sigmas = max(worst_sigmas, abs(est - closed) / se)
        assert lmmse_x(s, p, StrategyParams(1.0, b)) == 0.0
    report(9, worst_sigmas <= 4.0,
           f"|closed form - Monte Carlo| worst = {worst_sigmas:.2f} standard errors (<= 4)")


@pytest.mark.slow
def test_criterion_10_brute_force_equivalence():
    pts = [
        (SQRT_GOLDEN, 0.3, 0.0),
        (SQRT_GOLDEN, 1.0, 0.0),
        (SQRT_GOLDEN, 1.0, 0.5),
        (1.0, 0.3, 0.0),
        (1.0, 0.5, 0.25),
    ]
    worst = 0.0
    for s, p, r in pts:
        lo_brute = lower_bound_brute(s, p, r)  # 2001 x 1e5 (sigma_SU, gamma)
        lo_impl = lower_bound_mmse(ProblemParams(s, p, r)).value
        up_brute = upper_bound_brute(s, p, r)  # 2001 x 2001 (alpha, beta)
        up_impl = upper_bound_mmse(ProblemParams(s, p, r)).value
        for a, b in ((lo_impl, lo_brute), (up_impl, up_brute)):
            if a == b == 0.0:
                continue
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300))
    report(10, worst <= 1e-6,
           f"bound vs exhaustive-grid oracle worst rel diff = {worst:.2e} (<= 1e-6) at 5 points")
