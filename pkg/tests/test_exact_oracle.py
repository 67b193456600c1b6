"""Exact oracle contracts: binomial tails in log space and the sample-quantile
reduction, checked against exhaustive rational enumeration."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import binom_pmf_exact, binom_tail_exact, rel_err
from qdev import (
    LogProbability,
    QuantileProblem,
    binomial_tail_log,
    exact_tail,
    exact_tail_normalized,
    quantile,
    quantile_rank,
    sample_quantile_cdf,
    sample_quantile_from_data,
)
from qdev.errors import DegenerateDensityError, DomainError, ParameterError


class TestLogProbability:
    def test_roundtrip(self):
        lp = LogProbability(-2.5)
        assert lp.value == math.exp(-2.5)

    def test_limits(self):
        assert LogProbability.certain().value == 1.0
        assert LogProbability.impossible().value == 0.0
        assert LogProbability.impossible().log_value == -math.inf

    def test_underflow_to_zero(self):
        assert LogProbability(-800.0).value == 0.0

    def test_rejects_positive_and_nan(self):
        with pytest.raises(DomainError):
            LogProbability(0.1)
        with pytest.raises(DomainError):
            LogProbability(math.nan)

    def test_from_linear(self):
        assert LogProbability.from_linear(0.25).log_value == pytest.approx(math.log(0.25))
        assert LogProbability.from_linear(0.0).log_value == -math.inf
        with pytest.raises(DomainError):
            LogProbability.from_linear(1.5)


class TestSampleQuantileFromData:
    def test_rank_examples(self):
        assert sample_quantile_from_data([3, 1, 2], 0.5) == 2.0
        assert sample_quantile_from_data([5], 0.9) == 5.0
        assert sample_quantile_from_data([1, 2, 3, 4], 0.5) == 2.0

    def test_errors(self):
        with pytest.raises(DomainError):
            sample_quantile_from_data([], 0.5)
        with pytest.raises(DomainError):
            sample_quantile_from_data([1.0], 1.0)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60),
           st.floats(0.01, 0.99))
    def test_matches_sorted_rank(self, data, p):
        k = quantile_rank(len(data), p)
        assert sample_quantile_from_data(data, p) == sorted(data)[k - 1]


class TestBinomialTail:
    def test_trivial_cases(self):
        assert binomial_tail_log(2, 0.5, 1, "at_most").log_value == pytest.approx(
            math.log(0.75), rel=1e-15)
        assert binomial_tail_log(7, 0.0, 0, "at_most").log_value == 0.0
        assert binomial_tail_log(5, 0.3, -1, "at_most").value == 0.0
        assert binomial_tail_log(5, 0.3, 6, "at_least").value == 0.0
        assert binomial_tail_log(5, 0.3, 0, "at_least").value == 1.0
        assert binomial_tail_log(5, 0.3, 5, "at_most").value == 1.0
        assert binomial_tail_log(5, 1.0, 5, "at_least").value == 1.0
        assert binomial_tail_log(5, 1.0, 4, "at_most").value == 0.0

    def test_derived_example(self):
        # exhaustive pmf summation for n=5, q=0.7, k<=2
        ref = float(binom_tail_exact(5, 0.7, 2, "at_most"))
        got = binomial_tail_log(5, 0.7, 2, "at_most").value
        assert rel_err(got, ref) <= 1e-15
        assert got == pytest.approx(0.16308, abs=5e-6)

    @pytest.mark.parametrize("q", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 13, 20])
    def test_vs_exact_enumeration(self, n, q):
        pmf = binom_pmf_exact(n, q)
        lower = Fraction(0)
        for k in range(n + 1):
            lower += pmf[k]
            upper = 1 - lower + pmf[k]
            got_lo = binomial_tail_log(n, q, k, "at_most").value
            got_hi = binomial_tail_log(n, q, k, "at_least").value
            assert rel_err(got_lo, float(lower)) <= 1e-14
            assert rel_err(got_hi, float(upper)) <= 1e-14

    def test_deep_tail_log_accuracy(self):
        # n=200, far tail: compare in the log domain against the exact rational
        import mpmath as mp
        mp.mp.dps = 60
        n, q, k = 200, 0.7, 40
        ref = binom_tail_exact(n, q, k, "at_most")
        ref_log = float(mp.log(mp.mpf(ref.numerator)) - mp.log(mp.mpf(ref.denominator)))
        got = binomial_tail_log(n, q, k, "at_most").log_value
        assert abs(got - ref_log) <= 1e-11

    @given(st.integers(1, 200), st.floats(0.001, 0.999), st.integers(-1, 201))
    @settings(max_examples=120, deadline=None)
    def test_mass_conservation(self, n, q, k):
        lo = binomial_tail_log(n, q, k, "at_most").value
        hi = binomial_tail_log(n, q, k + 1, "at_least").value
        assert lo + hi == pytest.approx(1.0, abs=1e-12)

    def test_extreme_q_stays_finite(self):
        # q values from far distribution tails; logs stay finite, values sane
        for q in (1e-300, 1e-15, 1.0 - 1e-15):
            lp = binomial_tail_log(1000, q, 500, "at_most")
            assert not math.isnan(lp.log_value)
            assert lp.log_value <= 0.0
        deep = binomial_tail_log(10 ** 6, 1e-12, 100, "at_least")
        # Poisson leading term: 100 ln(nq) - ln(100!)
        poisson = 100 * math.log(1e-6) - math.lgamma(101)
        assert deep.log_value == pytest.approx(poisson, rel=1e-4)

    def test_large_n_vs_scipy(self):
        import scipy.stats as st_
        for n, q, k in ((10_000, 0.51, 5_000), (100_000, 0.503, 50_000), (5_000, 0.1, 400)):
            ours = binomial_tail_log(n, q, k, "at_most").log_value
            ref = float(st_.binom.logcdf(k, n, q))
            assert ours == pytest.approx(ref, abs=5e-9)

    def test_parameter_errors(self):
        with pytest.raises(ParameterError):
            binomial_tail_log(0, 0.5, 0, "at_most")
        with pytest.raises(ParameterError):
            binomial_tail_log(5, 1.5, 2, "at_most")
        with pytest.raises(ParameterError):
            binomial_tail_log(5, 0.5, 2, "sideways")
        with pytest.raises(ParameterError):
            binomial_tail_log(5, 0.5, 2.5, "at_most")


class TestExactTail:
    def test_uniform_upper_example(self, uniform01):
        lp = exact_tail(QuantileProblem(uniform01, 0.5, 5, 0.2, "upper"))
        assert lp.value == pytest.approx(0.16308, abs=5e-6)

    def test_support_exit_is_zero(self, uniform01):
        assert exact_tail(QuantileProblem(uniform01, 0.5, 10, 0.6, "upper")).value == 0.0
        assert exact_tail(QuantileProblem(uniform01, 0.5, 10, 0.6, "lower")).value == 0.0

    def test_boundary_strict_differs_by_pmf_term(self, uniform01):
        # np = 5 exactly; the strict convention drops the Bin = np term
        prob = QuantileProblem(uniform01, 0.5, 10, 0.1, "upper")
        q = prob.q
        inc = exact_tail(prob, "inclusive").value
        strict = exact_tail(prob, "strict").value
        pmf5 = float(binom_pmf_exact(10, q)[5])
        assert inc - strict == pytest.approx(pmf5, rel=1e-12)

    def test_boundary_noop_at_noninteger_np(self, uniform01):
        prob = QuantileProblem(uniform01, 0.5, 7, 0.1, "upper")
        assert exact_tail(prob, "inclusive").log_value == exact_tail(prob, "strict").log_value

    def test_symmetry_at_half(self, uniform01):
        up = exact_tail(QuantileProblem(uniform01, 0.5, 9, 0.17, "upper")).log_value
        lo = exact_tail(QuantileProblem(uniform01, 0.5, 9, 0.17, "lower")).log_value
        assert up == pytest.approx(lo, rel=1e-13)

    def test_monotone_in_t(self, uniform01):
        vals = [exact_tail(QuantileProblem(uniform01, 0.5, 25, t, "upper")).log_value
                for t in np.linspace(0.0, 0.49, 25)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_monotone_in_n_at_fixed_rate(self, uniform01):
        # fixed exceedance rate: k/n = p exactly along n = 0 mod 4
        vals = [exact_tail(QuantileProblem(uniform01, 0.5, n, 0.2, "upper")).log_value
                for n in range(4, 201, 4)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_problem_validation(self, uniform01):
        with pytest.raises(ParameterError):
            QuantileProblem(uniform01, 1.2, 5, 0.1, "upper")
        with pytest.raises(ParameterError):
            QuantileProblem(uniform01, 0.5, 0, 0.1, "upper")
        with pytest.raises(ParameterError):
            QuantileProblem(uniform01, 0.5, 5, -0.1, "upper")
        with pytest.raises(ParameterError):
            QuantileProblem(uniform01, 0.5, 5, 0.1, "above")


class TestExactTailNormalized:
    def test_scale_map(self, uniform01):
        # t_R = 1, n = 100, f = 1, sigma = 0.5 -> t = 0.05
        got = exact_tail_normalized(uniform01, 0.5, 100, 1.0, "upper").log_value
        want = exact_tail(QuantileProblem(uniform01, 0.5, 100, 0.05, "upper")).log_value
        assert got == pytest.approx(want, rel=1e-12)

    def test_zero_threshold(self, uniform01):
        got = exact_tail_normalized(uniform01, 0.5, 11, 0.0, "upper").log_value
        want = exact_tail(QuantileProblem(uniform01, 0.5, 11, 0.0, "upper")).log_value
        assert got == want

    def test_derived_example(self, uniform01):
        t_r = 0.2 * math.sqrt(5.0) / 0.5
        got = exact_tail_normalized(uniform01, 0.5, 5, t_r, "upper").value
        assert got == pytest.approx(0.16308, abs=5e-6)

    def test_negative_threshold_rejected(self, uniform01):
        with pytest.raises(DomainError):
            exact_tail_normalized(uniform01, 0.5, 5, -1.0, "upper")

    def test_degenerate_density_guard(self, uniform01, monkeypatch):
        # builtin families never have zero density at an interior quantile,
        # so force the guard with a stubbed density
        import qdev.exact as exact_mod
        monkeypatch.setattr(exact_mod, "pdf", lambda dist, x: 0.0)
        with pytest.raises(DegenerateDensityError):
            exact_tail_normalized(uniform01, 0.5, 5, 1.0, "upper")


class TestSampleQuantileCdf:
    def test_limits(self, uniform01):
        assert sample_quantile_cdf(uniform01, 0.5, 5, -10.0).value == 0.0
        assert sample_quantile_cdf(uniform01, 0.5, 5, 10.0).value == 1.0

    def test_single_draw(self, uniform01):
        assert sample_quantile_cdf(uniform01, 0.5, 1, 0.3).value == pytest.approx(0.3, rel=1e-14)

    def test_derived_example(self, uniform01):
        ref = float(binom_tail_exact(5, 0.7, 3, "at_least"))
        got = sample_quantile_cdf(uniform01, 0.5, 5, 0.7).value
        assert rel_err(got, ref) <= 1e-14
        assert got == pytest.approx(0.83692, abs=5e-6)

    def test_monotone_in_x(self, uniform01):
        vals = [sample_quantile_cdf(uniform01, 0.3, 17, x).log_value
                for x in np.linspace(0.01, 0.99, 40)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("n,p", [(7, 0.5), (10, 0.57), (23, 0.4), (100, 0.123)])
    def test_complement_consistency(self, uniform01, n, p):
        # with np non-integer: P(upper tail at t) = 1 - P(x_{n,p} <= x_p + t)
        assert not float(n * p).is_integer()
        x_p = quantile(uniform01, p)
        for t in (0.05, 0.1, 0.2):
            upper = exact_tail(QuantileProblem(uniform01, p, n, t, "upper")).value
            cdf_at = sample_quantile_cdf(uniform01, p, n, x_p + t).value
            assert upper + cdf_at == pytest.approx(1.0, abs=1e-12)
