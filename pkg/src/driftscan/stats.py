"""OLS slope estimation with a two-sided t-test on the slope."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

__all__ = ["RegressionResult", "slope_test", "betainc", "student_t_cdf", "student_t_sf2"]

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 500


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    p_value: float
    k: int


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a > 0 and b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= |t|)."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return betainc(df / 2.0, 0.5, df / (df + t * t))


def student_t_cdf(t: float, df: float) -> float:
    half_tail = 0.5 * student_t_sf2(t, df)
    return 1.0 - half_tail if t > 0 else half_tail


def slope_test(values: Sequence[float]) -> RegressionResult:
    """Least-squares slope of ``values`` against 0, 1, ..., k-1 and the two-sided
    p-value of the hypothesis slope == 0 (k - 2 degrees of freedom).

    A constant series gives slope 0 and p 1; a nonzero slope with no residual
    (including every two-point fit) gives p 0.
    """
    y = [float(v) for v in values]
    k = len(y)
    if k < 2:
        raise ValueError(f"slope test needs at least 2 points, got {k}")
    if all(v == y[0] for v in y):
        return RegressionResult(0.0, 1.0, k)
    x_mean = (k - 1) / 2.0
    y_mean = math.fsum(y) / k
    sxx = math.fsum((i - x_mean) ** 2 for i in range(k))
    sxy = math.fsum((i - x_mean) * (v - y_mean) for i, v in enumerate(y))
    syy = math.fsum((v - y_mean) ** 2 for v in y)
    slope = sxy / sxx
    sse = math.fsum((v - y_mean - slope * (i - x_mean)) ** 2 for i, v in enumerate(y))
    if k == 2 or sse <= 1e-24 * syy:
        return RegressionResult(slope, 0.0 if slope != 0.0 else 1.0, k)
    df = k - 2
    se = math.sqrt(sse / df / sxx)
    p = student_t_sf2(slope / se, df)
    return RegressionResult(slope, min(1.0, max(0.0, p)), k)
