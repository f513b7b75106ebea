import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special
from scipy import stats as sps

from framesim.stats import SummaryStats, betainc, student_t_cdf, summarize, t_test, t_test_raw


def t_density(x, df):
    logc = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))


def quad_cdf(t, df):
    if t <= 0:
        return integrate.quad(t_density, -np.inf, t, args=(df,), epsabs=1e-13, epsrel=1e-13)[0]
    return 0.5 + integrate.quad(t_density, 0.0, t, args=(df,), epsabs=1e-13, epsrel=1e-13)[0]


def test_summarize():
    assert summarize([1, 1, 1]) == SummaryStats(1.0, 0.0, 3)
    s = summarize([0, 2])
    assert (s.mean, s.n) == (1.0, 2)
    assert s.stdev == pytest.approx(math.sqrt(2), abs=1e-15)
    s = summarize([0.8, 1.0])
    assert s.mean == pytest.approx(0.9, abs=1e-15)
    assert s.stdev == pytest.approx(0.1414213562373095, abs=1e-12)
    with pytest.raises(ValueError):
        summarize([1.0])


def test_summary_parse_and_validation():
    assert SummaryStats.parse("0.92, 0.33, 2000") == SummaryStats(0.92, 0.33, 2000)
    for bad in ("1,2", "a,b,c"):
        with pytest.raises(ValueError):
            SummaryStats.parse(bad)
    with pytest.raises(ValueError):
        SummaryStats(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        SummaryStats(0.0, -1.0, 5)


def test_identical_summaries():
    s = SummaryStats(0.5, 0.2, 100)
    for kind in ("student", "welch"):
        r = t_test(s, s, kind)
        assert (r.t, r.p_two_sided) == (0.0, 1.0)


def test_degenerate_variance():
    with pytest.raises(ZeroDivisionError):
        t_test(SummaryStats(1, 0, 5), SummaryStats(2, 0, 5))
    with pytest.raises(ValueError):
        t_test(SummaryStats(1, 1, 5), SummaryStats(2, 1, 5), "paired")


def test_raw_hand_example():
    # means 1 and 6, both variances 2: SE = sqrt(2/2 + 2/2), df = 2 either way
    for kind in ("student", "welch"):
        r = t_test_raw([0, 2], [5, 7], kind)
        assert r.t == pytest.approx(-5 / math.sqrt(2), abs=1e-12)
        assert r.df == pytest.approx(2.0, abs=1e-12)
        # closed-form CDF for df = 2: 1/2 + t / (2 sqrt(2 + t^2))
        lower = 0.5 + r.t / (2 * math.sqrt(2 + r.t ** 2))
        assert r.p_two_sided == pytest.approx(2 * lower, abs=1e-12)


def test_raw_identical_samples():
    x = [0.1, 0.5, 0.9, 0.3]
    r = t_test_raw(x, x)
    assert (r.t, r.p_two_sided) == (0.0, 1.0)


@pytest.mark.parametrize("a, b, kind, t_expected", [
    ((0.92, 0.33, 2000), (0.71, 0.28, 2000), "welch", 21.70),
    ((0.92, 0.33, 2000), (0.75, 0.32, 2000), "welch", 16.54),
    ((0.43, 0.13, 1000), (0.38, 0.12, 1000), "student", 8.94),
])
def test_published_summaries(a, b, kind, t_expected):
    r = t_test(SummaryStats(*a), SummaryStats(*b), kind)
    assert r.t == pytest.approx(t_expected, abs=0.005)
    assert r.p_two_sided < 0.001
    ref = sps.ttest_ind_from_stats(*a, *b, equal_var=(kind == "student"))
    assert r.t == pytest.approx(ref.statistic, rel=1e-12)
    assert r.p_two_sided == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-300)


def test_cdf_symmetry_and_closed_forms():
    for df in (0.5, 1, 2, 7.3, 40):
        assert student_t_cdf(0.0, df) == 0.5
        for t in (0.1, 1.0, 3.7):
            assert student_t_cdf(t, df) + student_t_cdf(-t, df) == pytest.approx(1.0, abs=1e-15)
    assert student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-10)
    for t in np.linspace(-20, 20, 41):
        assert student_t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-10)
    assert 0.9749 <= student_t_cdf(1.96, 1e6) <= 0.9751
    assert student_t_cdf(math.inf, 3) == 1.0
    with pytest.raises(ValueError):
        student_t_cdf(1.0, 0)


@pytest.mark.parametrize("df", [1, 2, 5, 30, 1000])
def test_cdf_against_quadrature(df):
    for t in np.linspace(-10, 10, 41):
        assert abs(student_t_cdf(t, df) - quad_cdf(t, df)) <= 1e-6


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 1e4), st.floats(1e-3, 1e4), st.floats(0, 1))
def test_betainc_against_scipy(a, b, x):
    assert betainc(a, b, x) == pytest.approx(special.betainc(a, b, x), abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.floats(-50, 50), st.floats(0.05, 1e5))
def test_cdf_against_scipy(t, df):
    assert student_t_cdf(t, df) == pytest.approx(sps.t.cdf(t, df), abs=1e-10)


def _samples(seed):
    rng = random.Random(seed)
    a = [rng.gauss(rng.uniform(-1, 1), rng.uniform(0.1, 3)) for _ in range(rng.randint(2, 40))]
    b = [rng.gauss(rng.uniform(-1, 1), rng.uniform(0.1, 3)) for _ in range(rng.randint(2, 40))]
    return a, b


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["student", "welch"]))
def test_raw_matches_summary_path(seed, kind):
    a, b = _samples(seed)
    raw = t_test_raw(a, b, kind)
    via = t_test(summarize(a), summarize(b), kind)
    assert abs(raw.t - via.t) <= 1e-12 * max(1.0, abs(via.t))
    assert abs(raw.df - via.df) <= 1e-12 * via.df
    assert abs(raw.p_two_sided - via.p_two_sided) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["student", "welch"]))
def test_antisymmetry_and_df_bounds(seed, kind):
    a, b = _samples(seed)
    r1, r2 = t_test_raw(a, b, kind), t_test_raw(b, a, kind)
    assert r1.t == -r2.t
    assert r1.df == r2.df
    assert r1.p_two_sided == r2.p_two_sided
    assert 0.0 <= r1.p_two_sided <= 1.0
    if kind == "welch":
        assert min(len(a), len(b)) - 1 <= r1.df <= len(a) + len(b) - 2
    else:
        assert r1.df == len(a) + len(b) - 2
