import json
import math
from pathlib import Path

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import stats as sps

from driftscan.stats import betainc, slope_test, student_t_cdf, student_t_sf2

# Student t CDF values integrated numerically with mpmath at 40 digits
T_CDF = json.loads((Path(__file__).parent / "data" / "student_t_cdf.json").read_text())

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
# millesimal grid: avoids subnormal spreads that a shift would round away
series = st.lists(st.integers(-10**6, 10**6).map(lambda k: k / 1000), min_size=3, max_size=60)


@pytest.mark.parametrize("key", sorted(T_CDF, key=lambda k: (int(k.split(":")[0]), k)))
def test_t_cdf_against_reference(key):
    df, t = key.split(":")
    assert abs(student_t_cdf(float(t), int(df)) - T_CDF[key]) <= 1e-6
    assert abs(student_t_cdf(-float(t), int(df)) - (1 - T_CDF[key])) <= 1e-6


def test_t_cdf_closed_forms():
    # df=1 is Cauchy, df=2 has a simple closed form
    for t in (-4.0, -0.3, 0.0, 0.7, 12.0):
        assert student_t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-12)
        assert student_t_cdf(t, 2) == pytest.approx(0.5 + t / (2 * math.sqrt(2 + t * t)), abs=1e-12)
    assert student_t_sf2(math.inf, 3) == 0.0


def test_betainc_edges():
    assert betainc(2, 3, 0) == 0.0 and betainc(2, 3, 1) == 1.0
    assert betainc(1, 1, 0.3) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        betainc(0, 1, 0.5)


def test_constant_series():
    r = slope_test([1.0, 1.0, 1.0, 1.0])
    assert (r.slope, r.p_value, r.k) == (0.0, 1.0, 4)


def test_perfect_line():
    r = slope_test([1.0, 0.9, 0.8, 0.7])
    assert r.slope == pytest.approx(-0.1)
    assert r.p_value == 0.0


def test_two_points():
    assert slope_test([1.0, 0.75]).p_value == 0.0
    assert slope_test([0.5, 0.5]).p_value == 1.0


def test_noisy_flat_series_not_significant():
    values = [1.0, 0.98, 1.01, 0.99, 1.0]
    r = slope_test(values)
    ref = sps.linregress(range(5), values)
    assert r.p_value >= 0.05
    assert r.p_value == pytest.approx(ref.pvalue, abs=1e-9)
    assert r.slope == pytest.approx(ref.slope, abs=1e-12)


def test_too_short():
    with pytest.raises(ValueError):
        slope_test([1.0])


@given(series)
def test_matches_scipy(values):
    assume(len(set(values)) > 1)
    r = slope_test(values)
    ref = sps.linregress(range(len(values)), values)
    scale = max(1.0, max(abs(v) for v in values))
    assert r.slope == pytest.approx(ref.slope, abs=1e-9 * scale)
    if r.p_value not in (0.0, 1.0):
        assert r.p_value == pytest.approx(ref.pvalue, abs=1e-7)
    assert 0.0 <= r.p_value <= 1.0


@given(st.lists(st.floats(0.001, 10), min_size=2, max_size=30), finite)
def test_sign_of_monotone_series(steps, start):
    up = [start]
    for s in steps:
        up.append(up[-1] + s)
    assert slope_test(up).slope > 0
    assert slope_test([-v for v in up]).slope < 0


@given(series, st.floats(-100, 100))
def test_shift_invariance(values, c):
    assume(len(set(values)) > 1)
    a, b = slope_test(values), slope_test([v + c for v in values])
    assert b.slope == pytest.approx(a.slope, rel=1e-6, abs=1e-6)
    assert b.p_value == pytest.approx(a.p_value, abs=1e-6)


@given(series, st.floats(0.01, 100))
def test_scale_equivariance(values, c):
    assume(len(set(values)) > 1)
    a, b = slope_test(values), slope_test([c * v for v in values])
    assert b.slope == pytest.approx(c * a.slope, rel=1e-6, abs=1e-9)
    assert b.p_value == pytest.approx(a.p_value, abs=1e-6)
