import math
import random

import mpmath
import numpy as np
import pytest

from statcp.stats import (
    DegenerateSampleError,
    EmpiricalCdf,
    ExponentialCdf,
    Relation,
    confidence_band,
    exponential_cdf,
    kolmogorov_cdf,
    kolmogorov_inverse,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    ks_verdict,
    mean_feasible_interval,
    stephens_factor,
    student_t_cdf,
    student_t_inverse,
    t_one_sample,
    t_pvalue,
    t_two_sample_pooled,
)

SAMPLE = [8, 14, 6, 12, 12, 9, 10, 9, 10, 5]


def series_k(t, terms=50):
    return 1.0 - 2.0 * sum((-1) ** (k - 1) * math.exp(-2.0 * k * k * t * t)
                           for k in range(1, terms + 1))


def t_cdf_quad(dof, t):
    dens = lambda x: (mpmath.gamma((dof + 1) / 2) / (mpmath.sqrt(dof * mpmath.pi)
                      * mpmath.gamma(dof / 2)) * (1 + x * x / dof) ** (-(dof + 1) / 2))
    return float(mpmath.mpf(0.5) + mpmath.quad(dens, [0, t]))


# -- Kolmogorov distribution --------------------------------------------------------


def test_kolmogorov_cdf_values():
    assert kolmogorov_cdf(0.0) == 0.0
    assert kolmogorov_cdf(-1.0) == 0.0
    assert kolmogorov_cdf(10.0) == pytest.approx(1.0, abs=1e-12)
    assert kolmogorov_cdf(1.358) == pytest.approx(series_k(1.358), abs=1e-12)
    assert kolmogorov_cdf(1.358) == pytest.approx(0.95, abs=1e-4)


def test_kolmogorov_cdf_matches_series_and_is_increasing():
    ts = np.linspace(0.1, 3.0, 300)
    vals = [kolmogorov_cdf(t) for t in ts]
    for t, v in zip(ts, vals):
        assert v == pytest.approx(series_k(t), abs=1e-10)
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert all(kolmogorov_sf(t) == pytest.approx(1 - v, abs=1e-15) for t, v in zip(ts, vals))


def test_kolmogorov_inverse():
    assert kolmogorov_inverse(0.0) == 0.0
    assert kolmogorov_inverse(0.95) == pytest.approx(1.3580986, abs=1e-6)
    for p in (0.01, 0.3, 0.9, 0.999):
        assert kolmogorov_cdf(kolmogorov_inverse(p)) == pytest.approx(p, abs=1e-9)
    for bad in (-0.1, 1.0):
        with pytest.raises(ValueError):
            kolmogorov_inverse(bad)


# -- exponential --------------------------------------------------------------------


def test_exponential_cdf():
    assert exponential_cdf(0.2, 0) == 0.0
    assert exponential_cdf(0.2, 5) == pytest.approx(1 - math.exp(-1), abs=1e-12)
    assert exponential_cdf(0.2, -1) == 0.0
    with pytest.raises(ValueError):
        exponential_cdf(0.0, 1.0)
    f = ExponentialCdf(0.2)
    assert f.quantile(f(3.7)) == pytest.approx(3.7)


# -- KS statistics ------------------------------------------------------------------


def brute_one_sample(sample, cdf, eps=1e-9):
    """Sup over a dense set of probes around every jump."""
    ecdf = EmpiricalCdf(sample)
    probes = set()
    for x in sample:
        probes |= {x - eps, x, x + eps}
    dp = max(ecdf(x) - cdf(x) for x in probes)
    dm = max(cdf(x) - ecdf(x) for x in probes)
    n = len(sample)
    return math.sqrt(n) * max(dp, 0), math.sqrt(n) * max(dm, 0)


def test_ks_one_sample_single_point():
    stat = ks_one_sample([5], ExponentialCdf(0.2))
    assert stat.d_plus == pytest.approx(math.exp(-1))
    assert stat.d_minus == pytest.approx(1 - math.exp(-1))
    assert stat.d == pytest.approx(1 - math.exp(-1))


def test_ks_one_sample_at_midpoint_quantiles():
    n = 8
    f = ExponentialCdf(0.2)
    sample = [f.quantile((i - 0.5) / n) for i in range(1, n + 1)]
    stat = ks_one_sample(sample, f)
    assert stat.d_plus == pytest.approx(math.sqrt(n) * 0.5 / n)
    assert stat.d_minus == pytest.approx(math.sqrt(n) * 0.5 / n)


def test_ks_one_sample_against_own_ecdf():
    rng = random.Random(3)
    for _ in range(20):
        sample = [rng.randint(0, 6) for _ in range(rng.randint(1, 8))]
        stat = ks_one_sample(sample, EmpiricalCdf(sample))
        assert stat.d <= math.sqrt(len(sample)) / len(sample) + 1e-12


def test_ks_one_sample_matches_probe_brute_force():
    rng = random.Random(11)
    f = ExponentialCdf(0.3)
    for _ in range(50):
        sample = [rng.randint(0, 12) for _ in range(rng.randint(1, 9))]
        stat = ks_one_sample(sample, f)
        dp, dm = brute_one_sample(sample, f)
        assert stat.d_plus == pytest.approx(dp, abs=1e-7)
        assert stat.d_minus == pytest.approx(dm, abs=1e-7)


def test_pointwise_sup_under_measures_d_minus():
    f = ExponentialCdf(0.2)
    exact = ks_one_sample([5], f)
    point = ks_one_sample([5], f, sup="pointwise")
    assert point.d_plus == exact.d_plus
    assert point.d_minus == 0.0 < exact.d_minus
    with pytest.raises(ValueError):
        ks_one_sample([], f)
    with pytest.raises(ValueError):
        ks_one_sample([1], f, sup="other")


def test_ks_two_sample_examples():
    assert ks_two_sample([1, 2, 3], [1, 2, 3]).d == 0.0
    stat = ks_two_sample([0], [1])
    assert stat.d_plus == pytest.approx(math.sqrt(0.5))
    assert stat.d_minus == 0.0
    with pytest.raises(ValueError):
        ks_two_sample([], [1])


def test_ks_two_sample_modes_bracket_exact():
    rng = random.Random(5)
    for _ in range(100):
        a = [rng.randint(0, 6) for _ in range(rng.randint(1, 6))]
        b = [rng.randint(0, 6) for _ in range(rng.randint(1, 6))]
        exact = ks_two_sample(a, b)
        ref = ks_two_sample(a, b, sup="reference")
        point = ks_two_sample(a, b, sup="pointwise")
        assert point.d_plus <= exact.d_plus + 1e-12 <= ref.d_plus + 2e-12
        assert point.d_minus <= exact.d_minus + 1e-12 <= ref.d_minus + 2e-12


def test_ks_two_sample_merged_grid_brute_force():
    rng = random.Random(8)
    for _ in range(50):
        a = [rng.randint(0, 9) for _ in range(rng.randint(1, 7))]
        b = [rng.randint(0, 9) for _ in range(rng.randint(1, 7))]
        fa, fb = EmpiricalCdf(a), EmpiricalCdf(b)
        grid = sorted(set(a) | set(b))
        scale = math.sqrt(len(a) * len(b) / (len(a) + len(b)))
        stat = ks_two_sample(a, b)
        assert stat.d_plus == pytest.approx(scale * max(0, max(fa(x) - fb(x) for x in grid)))
        assert stat.d_minus == pytest.approx(scale * max(0, max(fb(x) - fa(x) for x in grid)))


def test_fig3_statistics():
    ref = [9, 10, 9, 6, 11, 8, 10, 11, 14, 11]
    rejected = ks_two_sample(ref, [5, 5, 9, 9, 9, 9, 9, 9, 9, 9])
    assert rejected.d == pytest.approx(0.6 * math.sqrt(5))
    accepted = ks_two_sample(ref, [5, 5, 9, 9, 9, 9, 9, 10, 10, 11])
    assert ks_verdict(accepted.d, 0.05).reject is False


# -- verdicts -----------------------------------------------------------------------


def test_ks_verdict():
    out = ks_verdict(0.0, 0.05)
    assert out.p_value == 1.0 and not out.reject
    boundary = ks_verdict(1.358, 0.05)
    assert boundary.p_value == pytest.approx(1 - series_k(1.358), abs=1e-12)
    assert not boundary.reject
    assert ks_verdict(2.0, 0.05).reject
    exact_boundary = ks_verdict(kolmogorov_inverse(0.95), 0.05)
    assert exact_boundary.p_value == pytest.approx(0.05, abs=1e-9)
    for bad in (0.0, 1.0, 1.5):
        with pytest.raises(ValueError):
            ks_verdict(1.0, bad)


def test_stephens_factor_strengthens_statistic():
    assert stephens_factor(5) == pytest.approx(1 + 0.12 / math.sqrt(5) + 0.11 / 5)
    plain, corrected = ks_verdict(1.3, 0.05), ks_verdict(1.3, 0.05, n_eff=5)
    assert corrected.p_value < plain.p_value
    assert corrected.reject and not plain.reject


# -- Student's t --------------------------------------------------------------------


def test_student_t_cdf_values():
    assert student_t_cdf(9, 0.0) == 0.5
    assert student_t_cdf(9, -2.2622) == pytest.approx(t_cdf_quad(9, -2.2622), abs=1e-10)
    assert student_t_cdf(9, -2.2622) == pytest.approx(0.025, abs=1e-5)
    assert student_t_cdf(1, 1.0) == pytest.approx(0.5 + math.atan(1.0) / math.pi, abs=1e-12)
    for t in (-3.0, -0.4, 0.7, 4.2):
        assert student_t_cdf(5, t) + student_t_cdf(5, -t) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        student_t_cdf(0, 1.0)


def test_student_t_inverse():
    assert student_t_inverse(9, 0.5) == pytest.approx(0.0, abs=1e-12)
    assert student_t_inverse(9, 0.025) == pytest.approx(-2.2621571628, abs=1e-8)
    assert student_t_cdf(9, student_t_inverse(9, 0.9)) == pytest.approx(0.9, abs=1e-9)
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            student_t_inverse(9, bad)


def test_t_one_sample():
    assert t_one_sample(SAMPLE, 9.5) == 0.0
    s = math.sqrt(sum((x - 9.5) ** 2 for x in SAMPLE) / 9)
    assert s ** 2 == pytest.approx(68.5 / 9)
    assert t_one_sample(SAMPLE, 12) == pytest.approx((9.5 - 12) / (s / math.sqrt(10)))
    with pytest.raises(DegenerateSampleError):
        t_one_sample([3, 3, 3], 2)
    with pytest.raises(ValueError):
        t_one_sample([3], 2)


def test_t_two_sample_pooled():
    t, dof = t_two_sample_pooled([1, 2, 3], [1, 2, 3])
    assert t == 0.0 and dof == 4
    a, b = [1, 2, 3], [1, 2, 3, 4, 5, 6]
    ma, mb = sum(a) / 3, sum(b) / 6
    s2 = (sum((x - ma) ** 2 for x in a) + sum((x - mb) ** 2 for x in b)) / 7
    t, dof = t_two_sample_pooled(a, b)
    assert t == pytest.approx((ma - mb) / math.sqrt(s2 * (1 / 3 + 1 / 6)))
    assert dof == 7
    assert t_two_sample_pooled(list(range(10)), list(range(10)))[1] == 18
    with pytest.raises(DegenerateSampleError):
        t_two_sample_pooled([2, 2], [2, 2])


def test_t_pvalue_directions():
    assert t_pvalue(2.0, 9, Relation.LE) == pytest.approx(student_t_cdf(9, -2.0))
    assert t_pvalue(2.0, 9, Relation.GE) == pytest.approx(student_t_cdf(9, 2.0))
    assert t_pvalue(2.0, 9, Relation.EQ) == pytest.approx(2 * student_t_cdf(9, -2.0))


def test_mean_feasible_interval():
    lo, hi = mean_feasible_interval(SAMPLE, 0.05, Relation.EQ)
    assert lo == pytest.approx(7.527, abs=1e-3) and hi == pytest.approx(11.473, abs=1e-3)
    assert [m for m in range(21) if lo <= m <= hi] == [8, 9, 10, 11]
    for m in (lo + 1e-7, hi - 1e-7):
        assert t_pvalue(t_one_sample(SAMPLE, m), 9, Relation.EQ) >= 0.05
    narrow = mean_feasible_interval(SAMPLE, 0.999, Relation.EQ)
    assert narrow[1] - narrow[0] < 0.01
    assert narrow[0] < 9.5 < narrow[1]
    lo, hi = mean_feasible_interval(SAMPLE, 0.05, "<=")
    assert hi == math.inf and lo < 9.5
    lo, hi = mean_feasible_interval(SAMPLE, 0.05, ">=")
    assert lo == -math.inf and hi > 9.5


# -- empirical CDF and band ---------------------------------------------------------


def test_empirical_cdf():
    f = EmpiricalCdf([3, 1, 3, 2])
    assert [f(x) for x in (0, 1, 2, 2.5, 3, 9)] == [0, 0.25, 0.5, 0.5, 1.0, 1.0]
    assert f.left_limit(3) == 0.5
    assert f.points == (1.0, 2.0, 3.0) or list(f.points) == [1.0, 2.0, 3.0]


def test_confidence_band():
    assert confidence_band(24, 0.05) == pytest.approx(kolmogorov_inverse(0.95) / math.sqrt(24))
    assert confidence_band(24, 0.05) == pytest.approx(0.2772, abs=1e-4)
    widths = [confidence_band(24, a) for a in (0.5, 0.9, 0.999, 1 - 1e-12)]
    assert all(b < a for a, b in zip(widths, widths[1:]))
    assert widths[-1] < 0.05
    with pytest.raises(ValueError):
        confidence_band(24, 1.0)


def test_confidence_band_coverage_monte_carlo():
    rng = np.random.default_rng(2024)
    n, alpha, draws = 24, 0.05, 10000
    half = confidence_band(n, alpha)
    samples = np.sort(rng.exponential(5.0, size=(draws, n)), axis=1)
    f = 1 - np.exp(-samples / 5.0)
    i = np.arange(1, n + 1)
    dev = np.maximum((i / n - f).max(axis=1), (f - (i - 1) / n).max(axis=1))
    coverage = np.mean(dev <= half)
    assert abs(coverage - (1 - alpha)) <= 0.02
