"""Student's and Welch's two-sample t-tests with exact two-sided p-values.

The t distribution CDF goes through the regularized incomplete beta
function, evaluated by Lentz's continued fraction.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np

KINDS = ("student", "welch")

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 100_000


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    stdev: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if self.stdev < 0:
            raise ValueError(f"stdev must be non-negative, got {self.stdev}")

    @classmethod
    def parse(cls, text: str) -> "SummaryStats":
        """From ``"mean,stdev,n"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected 'mean,stdev,n', got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p_two_sided: float
    kind: str

    def to_record(self, comparison: str, n1: int, n2: int) -> dict:
        return {"comparison": comparison, "kind": self.kind, "t": self.t, "df": self.df,
                "p": self.p_two_sided, "n1": n1, "n2": n2}


def summarize(sample: Sequence[float]) -> SummaryStats:
    if len(sample) < 2:
        raise ValueError(f"need at least 2 values, got {len(sample)}")
    return SummaryStats(statistics.fmean(sample), statistics.stdev(sample), len(sample))


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``.

    ``y`` may be given as ``1 - x`` computed without cancellation.
    """
    if a <= 0 or b <= 0:
        raise ValueError("betainc requires a > 0 and b > 0")
    if y is None:
        y = 1.0 - x
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    lbeta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    front = math.exp(a * math.log(x) + b * math.log(y) - lbeta)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def student_t_cdf(t: float, df: float) -> float:
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    t2 = t * t
    # lower tail P(T <= -|t|) = I_{df/(df+t^2)}(df/2, 1/2) / 2
    tail = 0.5 * betainc(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2))
    return 1.0 - tail if t > 0 else tail


def _two_sided_p(t: float, df: float) -> float:
    return min(1.0, 2.0 * student_t_cdf(-abs(t), df))


def _t_from_moments(m1, v1, n1, m2, v2, n2, kind) -> TTestResult:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if v1 == 0.0 and v2 == 0.0:
        raise ZeroDivisionError("both samples have zero variance; t statistic is undefined")
    if kind == "student":
        df = float(n1 + n2 - 2)
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / df
        se = math.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    else:
        q1, q2 = v1 / n1, v2 / n2
        se = math.sqrt(q1 + q2)
        df = (q1 + q2) ** 2 / (q1 * q1 / (n1 - 1) + q2 * q2 / (n2 - 1))
        # Welch-Satterthwaite is bounded by these; clip rounding excursions
        df = min(max(df, float(min(n1, n2) - 1)), float(n1 + n2 - 2))
    t = (m1 - m2) / se
    return TTestResult(t, df, _two_sided_p(t, df), kind)


def t_test(a: SummaryStats, b: SummaryStats, kind: str = "welch") -> TTestResult:
    return _t_from_moments(a.mean, a.stdev ** 2, a.n, b.mean, b.stdev ** 2, b.n, kind)


def t_test_raw(a: Sequence[float], b: Sequence[float], kind: str = "welch") -> TTestResult:
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise ValueError("each sample needs at least 2 values")
    return _t_from_moments(float(x.mean()), float(x.var(ddof=1)), len(x),
                           float(y.mean()), float(y.var(ddof=1)), len(y), kind)


def dump_report(records) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)
