import math

import numpy as np
import pytest

from embedbounds import (
    FeasibilityError,
    Interval,
    ParameterError,
    ProblemParams,
    feasible,
    sigma_su_range,
)
from embedbounds.core import pos_part, rate_power_floor


def test_params_validation():
    ProblemParams(1.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        ProblemParams(0.0, 1.0, 0.0)  # sigma = 0 rejected
    with pytest.raises(ParameterError):
        ProblemParams(-1.0, 1.0, 0.0)
    with pytest.raises(ParameterError):
        ProblemParams(1.0, -0.1, 0.0)
    with pytest.raises(ParameterError):
        ProblemParams(1.0, 1.0, -0.1)
    with pytest.raises(ParameterError):
        ProblemParams(float("inf"), 1.0, 0.0)


def test_interval():
    iv = Interval(-1.0, 2.0)
    assert iv.contains(0.0) and iv.contains(-1.0) and iv.contains(2.0)
    assert not iv.contains(2.0000001)
    assert iv.contains(2.0000001, tol=1e-3)
    with pytest.raises(ParameterError):
        Interval(1.0, 0.0)


def test_feasible_examples():
    assert feasible(ProblemParams(1.0, 0.0, 0.0))  # 2^0 - 1 = 0
    # paper: below P = 1, communication at R = 0.5 is not possible
    assert not feasible(ProblemParams(1.0, 0.9, 0.5))
    assert feasible(ProblemParams(2.0, 3.0, 1.0))  # 2^2 - 1 = 3, boundary included
    assert feasible(ProblemParams(1.0, 1.0, 0.5))
    assert not feasible(ProblemParams(1.0, 1.0 - 1e-6, 0.5))


def test_feasible_monotone():
    rng = np.random.default_rng(7)
    for _ in range(500):
        s = float(rng.uniform(0.1, 10))
        p = float(rng.uniform(0, 5))
        r = float(rng.uniform(0, 2))
        if feasible(ProblemParams(s, p, r)):
            assert feasible(ProblemParams(s, p + float(rng.uniform(0, 3)), r))
            assert feasible(ProblemParams(s, p, r * float(rng.uniform(0, 1))))


def test_sigma_su_range_examples():
    iv = sigma_su_range(ProblemParams(1.0, 1.0, 0.0))
    assert iv.lo == -1.0 and iv.hi == 1.0
    iv = sigma_su_range(ProblemParams(1.0, 3.0, 1.0))
    assert iv.lo == pytest.approx(-0.5, abs=0) and iv.hi == pytest.approx(math.sqrt(3.0))
    iv = sigma_su_range(ProblemParams(1.0, 0.0, 0.0))
    assert iv.lo == 0.0 and iv.hi == 0.0
    with pytest.raises(FeasibilityError):
        sigma_su_range(ProblemParams(1.0, 0.9, 0.5))


def test_sigma_su_range_lower_endpoint():
    rng = np.random.default_rng(11)
    for _ in range(300):
        s = float(rng.uniform(0.1, 10))
        p = float(rng.uniform(0, 10))
        iv = sigma_su_range(ProblemParams(s, p, 0.0))
        assert iv.lo == -s * math.sqrt(p)  # R = 0: full Cauchy-Schwarz interval
        r = float(rng.uniform(0, 0.5 * math.log2(1 + p))) if p > 0 else 0.0
        iv_r = sigma_su_range(ProblemParams(s, p, r))
        assert iv_r.lo >= -s * math.sqrt(p) - 1e-15
        assert iv_r.hi == iv.hi


def test_determinism():
    a = sigma_su_range(ProblemParams(1.3, 2.7, 0.4))
    b = sigma_su_range(ProblemParams(1.3, 2.7, 0.4))
    assert a == b


def test_helpers():
    assert pos_part(-3.0) == 0.0 and pos_part(2.5) == 2.5
    assert np.all(pos_part(np.array([-1.0, 0.0, 4.0])) == [0.0, 0.0, 4.0])
    assert rate_power_floor(0.0) == 0.0
    assert rate_power_floor(0.5) == pytest.approx(1.0)
    assert rate_power_floor(1.0) == pytest.approx(3.0)
