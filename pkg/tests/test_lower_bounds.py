import math

import numpy as np
import pytest

from embedbounds import (
    FeasibilityError,
    GammaSearchConfig,
    ParameterError,
    ProblemParams,
    SigmaSuSearchConfig,
    lower_bound_curve,
    lower_bound_mmse,
    old_lower_bound,
)
from embedbounds.lower_bounds import lb_inner, lb_sup_gamma

from oracles import lower_bound_brute, sup_gamma_brute

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT_GOLDEN = math.sqrt(GOLDEN)


class TestLbInner:
    def test_p0_reduces_to_host_estimation(self):
        # (sigma=1, P=0, R=0, su=0, gamma=1) -> sigma^2/(1+sigma^2) = 1/2
        assert lb_inner(ProblemParams(1.0, 0.0, 0.0), 0.0, 1.0) == pytest.approx(
            0.5, abs=1e-15
        )

    def test_legacy_integrand_at_endpoint(self):
        # gamma=1 at su = sigma*sqrt(P) reproduces the legacy bound's integrand
        for s, p in [(1.0, 0.25), (2.0, 1.5), (0.5, 0.04)]:
            got = lb_inner(ProblemParams(s, p, 0.0), s * math.sqrt(p), 1.0)
            assert got == pytest.approx(float(old_lower_bound(s, p)), abs=1e-15)

    def test_frozen_high_precision_values(self):
        # mpmath (50 digits) evaluations of the inf-sup integrand
        got = lb_inner(ProblemParams(1.0, 4.0, 0.0), -1.9, 0.7)
        assert got == 0.0  # positive part clamps: sqrt(q)=1.6876... > A=0.674...
        got = lb_inner(ProblemParams(1.0, 0.25, 0.0), -0.3, 0.8)
        assert got == pytest.approx(0.08587839320786755, rel=1e-14)

    def test_domain_errors(self):
        params = ProblemParams(1.0, 1.0, 0.0)
        with pytest.raises(ParameterError):
            lb_inner(params, 0.0, 0.0)
        with pytest.raises(ParameterError):
            lb_inner(params, 0.0, -1.0)
        with pytest.raises(ParameterError):
            lb_inner(params, 1.5, 1.0)  # outside [-1, 1]
        with pytest.raises(FeasibilityError):
            lb_inner(ProblemParams(1.0, 0.5, 0.5), 0.0, 1.0)

    def test_nonnegative_radicand_on_range(self):
        rng = np.random.default_rng(3)
        for _ in range(2000):
            s = float(rng.uniform(0.05, 20))
            p = float(rng.uniform(0.0, 20))
            su = float(rng.uniform(-s * math.sqrt(p), s * math.sqrt(p)))
            g = float(10 ** rng.uniform(-6, 6))
            if s * s + p + 2 * su < 1e-9:
                continue
            v = lb_inner(ProblemParams(s, p, 0.0), su, g)  # must not raise
            assert v >= 0.0


class TestSupGamma:
    def test_p0_analytic_sup(self):
        v, g_star = lb_sup_gamma(ProblemParams(1.0, 0.0, 0.0), 0.0)
        assert v == pytest.approx(0.5, abs=1e-13)
        assert g_star == pytest.approx(1.0, abs=1e-12)

    def test_dominates_fixed_gamma(self):
        params = ProblemParams(1.0, 1.0, 0.0)
        v, _ = lb_sup_gamma(params, 1.0)
        assert v >= lb_inner(params, 1.0, 1.0) - 1e-15
        assert v >= 0.0

    def test_frozen_brute_force_value(self):
        # oracle: exhaustive 1e6-point gamma grid, log10 gamma in [-8, 8]
        v, _ = lb_sup_gamma(ProblemParams(SQRT_GOLDEN, 0.1, 0.0), 0.0)
        assert v == pytest.approx(0.15629532729871065, rel=5e-9)
        assert v >= 0.15629532729871065 - 1e-12  # grid can only undershoot

    @pytest.mark.slow
    def test_brute_force_agreement_random(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            s = float(rng.uniform(0.1, 5))
            p = float(rng.uniform(0, 5))
            r = float(rng.uniform(0, 0.5 * math.log2(1 + p))) if p > 0 else 0.0
            lo = max(-s * math.sqrt(p), (2 ** (2 * r) - 1 - p - s * s) / 2)
            su = float(rng.uniform(lo, s * math.sqrt(p)))
            if s * s + p + 2 * su < 1e-9:
                continue
            vb = sup_gamma_brute(s, p, r, su, n=400_000)
            vi, _ = lb_sup_gamma(ProblemParams(s, p, r), su)
            assert vi >= vb - 1e-12  # closed-form candidates dominate any grid
            assert vi == pytest.approx(vb, rel=2e-6, abs=1e-12)

    def test_spec_default_config_matches_trimmed_default(self):
        # the wide safety config (513-point grid, 60 golden iterations) must
        # agree with the default; the stationary-point candidates carry both
        wide = GammaSearchConfig(coarse_points=513, refine_iters=60)
        rng = np.random.default_rng(5)
        for _ in range(40):
            s = float(rng.uniform(0.1, 5))
            p = float(rng.uniform(0, 5))
            su = float(rng.uniform(-s * math.sqrt(p), s * math.sqrt(p)))
            if s * s + p + 2 * su < 1e-9:
                continue
            params = ProblemParams(s, p, 0.0)
            v1, _ = lb_sup_gamma(params, su)
            v2, _ = lb_sup_gamma(params, su, wide)
            assert v1 == pytest.approx(v2, rel=1e-10, abs=1e-13)


class TestLowerBound:
    def test_p0_value(self):
        res = lower_bound_mmse(ProblemParams(1.0, 0.0, 0.0))
        assert res.value == pytest.approx(0.5, abs=1e-12)
        assert res.sigma_su_star == 0.0
        assert res.gamma_star == pytest.approx(1.0, abs=1e-12)

    def test_frozen_brute_force_value(self):
        # oracle: 2001 x 1e5 (sigma_SU, gamma) grid
        res = lower_bound_mmse(ProblemParams(SQRT_GOLDEN, 0.3, 0.0))
        assert res.value == pytest.approx(0.021971618586898518, rel=1e-6)

    def test_dominates_legacy(self):
        rng = np.random.default_rng(17)
        for _ in range(400):
            s = float(rng.uniform(0.05, 20))
            p = float(rng.uniform(0, 20))
            new = lower_bound_mmse(ProblemParams(s, p, 0.0)).value
            assert new >= float(old_lower_bound(s, p)) - 1e-12

    def test_monotone_in_rate(self):
        rng = np.random.default_rng(23)
        for _ in range(60):
            s = float(rng.uniform(0.2, 5))
            p = float(rng.uniform(0.5, 8))
            rates = np.sort(rng.uniform(0, 0.5 * math.log2(1 + p), size=4))
            vals = [lower_bound_mmse(ProblemParams(s, p, float(r))).value for r in rates]
            for a, b in zip(vals, vals[1:]):
                assert b >= a - 1e-12

    def test_zero_at_large_power(self):
        # P >= 2 sigma^2 sweep: wherever the gamma* inner term is nonpositive
        # for every grid sigma_SU, the bound must be exactly 0 and the brute
        # oracle must agree
        for s, p in [(1.0, 2.0), (0.5, 2.0), (2.0, 8.0)]:
            c = s * s
            su = np.linspace(-s * math.sqrt(p), s * math.sqrt(p), 801)
            a = c + p + 2 * su
            keep = a > 1e-12
            su, a = su[keep], a[keep]
            b = c + su
            A = np.sqrt(c / (1.0 + a))
            g_star = np.where(b > 0, b / a, 1.0)
            u = 1.0 - g_star
            q = u * u * c + g_star * g_star * p - 2.0 * g_star * u * su
            nonpositive_somewhere = np.any(A - np.sqrt(np.maximum(q, 0)) <= 0)
            got = lower_bound_mmse(ProblemParams(s, float(p), 0.0)).value
            if nonpositive_somewhere:
                assert got == 0.0
                assert lower_bound_brute(s, p, 0.0, n_su=801, n_g=20_000) == 0.0

    def test_infeasible_raises(self):
        with pytest.raises(FeasibilityError):
            lower_bound_mmse(ProblemParams(1.0, 0.9, 0.5))

    def test_determinism(self):
        params = ProblemParams(1.7, 0.9, 0.2)
        a = lower_bound_mmse(params)
        b = lower_bound_mmse(params)
        assert a == b

    def test_result_internals_in_range(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            s = float(rng.uniform(0.2, 5))
            p = float(rng.uniform(0, 5))
            res = lower_bound_mmse(ProblemParams(s, p, 0.0))
            assert res.value >= 0.0
            assert -s * math.sqrt(p) - 1e-12 <= res.sigma_su_star <= s * math.sqrt(p) + 1e-12
            assert res.gamma_star > 0.0

    def test_curve_matches_scalar(self):
        powers = np.array([0.0, 0.2, 1.0, 3.7])
        vals, sus, gammas = lower_bound_curve(1.3, powers, 0.0)
        for i, p in enumerate(powers):
            res = lower_bound_mmse(ProblemParams(1.3, float(p), 0.0))
            assert res.value == vals[i]
            assert res.gamma_star == gammas[i]


class TestOldLowerBound:
    def test_analytic_points(self):
        assert float(old_lower_bound(1.0, 0.0)) == pytest.approx(0.5, abs=1e-15)
        assert float(old_lower_bound(1.0, 1.0)) == 0.0  # sqrt(1/5) < 1 clamps

    def test_frozen_high_precision_value(self):
        # mpmath (50 digits) direct substitution
        assert float(old_lower_bound(10.0, 0.04)) == pytest.approx(
            0.6017325826254697, rel=1e-14
        )

    def test_array_input(self):
        out = old_lower_bound(np.array([1.0, 10.0]), np.array([0.0, 0.04]))
        assert out.shape == (2,)
        assert out[0] == pytest.approx(0.5)

    def test_validation(self):
        with pytest.raises(ParameterError):
            old_lower_bound(0.0, 1.0)
        with pytest.raises(ParameterError):
            old_lower_bound(1.0, -1.0)


def test_config_validation():
    with pytest.raises(ParameterError):
        GammaSearchConfig(log_gamma_lo=2.0, log_gamma_hi=1.0)
    with pytest.raises(ParameterError):
        GammaSearchConfig(coarse_points=2)
    with pytest.raises(ParameterError):
        SigmaSuSearchConfig(grid_points=1)
