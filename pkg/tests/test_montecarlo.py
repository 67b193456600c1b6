"""Simulation determinism, backend agreement, and statistical consistency."""

import math

import numpy as np
import pytest
import scipy.stats

from qdev import (
    DistributionSpec,
    QuantileProblem,
    SimConfig,
    bahadur_remainder_study,
    clopper_pearson,
    empirical_tail,
    exact_tail,
    quantile,
    sample_quantile_cdf,
    simulate_quantiles,
)
from qdev.backend import active_backend, numba_available, set_backend
from qdev.errors import ParameterError
from qdev.montecarlo import _scaled_remainders

needs_numba = pytest.mark.skipif(not numba_available(), reason="numba not installed")


@pytest.fixture(autouse=True)
def _restore_backend():
    yield
    set_backend(None)


def test_config_validation(uniform01):
    with pytest.raises(ParameterError):
        SimConfig(seed=-1, replicates=10, n=5, dist=uniform01, p=0.5)
    with pytest.raises(ParameterError):
        SimConfig(seed=0, replicates=0, n=5, dist=uniform01, p=0.5)
    with pytest.raises(ParameterError):
        SimConfig(seed=0, replicates=10, n=5, dist=uniform01, p=1.0)


def test_determinism(uniform01):
    cfg = SimConfig(seed=123, replicates=500, n=17, dist=uniform01, p=0.3)
    a = simulate_quantiles(cfg)
    b = simulate_quantiles(cfg)
    assert np.array_equal(a, b)
    c = simulate_quantiles(SimConfig(seed=124, replicates=500, n=17, dist=uniform01, p=0.3))
    assert not np.array_equal(a, c)


def test_single_draw_matches_stream(uniform01):
    # replicates=1, n=1: the output is the one transformed uniform of the stream
    from qdev._mc_numpy import _u01
    cfg = SimConfig(seed=9, replicates=1, n=1, dist=uniform01, p=0.5)
    set_backend("numpy")
    got = simulate_quantiles(cfg)[0]
    u = _u01(np.uint64(9), np.arange(1, dtype=np.uint64))[0]
    assert got == u


def test_values_land_in_support():
    d = DistributionSpec("exponential", (2.0,))
    cfg = SimConfig(seed=5, replicates=300, n=9, dist=d, p=0.7)
    q = simulate_quantiles(cfg)
    assert np.all(q > 0.0) and np.all(np.isfinite(q))


@needs_numba
def test_backends_agree(all_families):
    for dist in all_families:
        cfg = SimConfig(seed=77, replicates=400, n=23, dist=dist, p=0.4)
        set_backend("numba")
        a = simulate_quantiles(cfg)
        set_backend("numpy")
        b = simulate_quantiles(cfg)
        if dist.family == "uniform":
            assert np.array_equal(a, b)
        else:
            # numpy SIMD transcendentals round differently from scalar libm
            np.testing.assert_allclose(a, b, rtol=5e-16, atol=0.0)


@needs_numba
def test_thread_count_invariance(uniform01, monkeypatch):
    d = DistributionSpec("normal", (0.0, 1.0))
    cfg = SimConfig(seed=31, replicates=600, n=40, dist=d, p=0.5)
    set_backend("numba")
    monkeypatch.setenv("QDEV_THREADS", "1")
    a = simulate_quantiles(cfg)
    monkeypatch.setenv("QDEV_THREADS", "8")
    b = simulate_quantiles(cfg)
    assert np.array_equal(a, b)


def test_backend_env_selection(monkeypatch):
    monkeypatch.setenv("QDEV_BACKEND", "numpy")
    assert active_backend() == "numpy"
    monkeypatch.setenv("QDEV_BACKEND", "bogus")
    with pytest.raises(ParameterError):
        active_backend()


def test_clopper_pearson_vs_scipy():
    for hits, total in ((0, 50), (3, 50), (25, 50), (50, 50), (499, 1000)):
        lo, hi = clopper_pearson(hits, total)
        ref = scipy.stats.binomtest(hits, total).proportion_ci(0.95, method="exact")
        assert lo == pytest.approx(ref.low, abs=1e-12)
        assert hi == pytest.approx(ref.high, abs=1e-12)


def test_empirical_tail_fields(uniform01):
    cfg = SimConfig(seed=11, replicates=2000, n=5, dist=uniform01, p=0.5)
    tail = empirical_tail(cfg, 0.2, "upper")
    assert tail.replicates == 2000
    assert 0.0 <= tail.ci_low <= tail.estimate <= tail.ci_high <= 1.0
    assert tail.estimate == tail.hits / 2000


def test_empirical_tail_beyond_support(uniform01):
    cfg = SimConfig(seed=11, replicates=500, n=5, dist=uniform01, p=0.5)
    assert empirical_tail(cfg, 0.8, "upper").hits == 0


def test_empirical_tail_covers_exact(uniform01):
    cfg = SimConfig(seed=2, replicates=30_000, n=5, dist=uniform01, p=0.5)
    tail = empirical_tail(cfg, 0.2, "upper")
    exact = exact_tail(QuantileProblem(uniform01, 0.5, 5, 0.2, "upper")).value
    assert tail.ci_low <= exact <= tail.ci_high


def test_upper_boundary_convention_at_integer_np(uniform01):
    # at integer np the simulated order-statistic event drops the Bin = np
    # boundary term that the count-identity oracle keeps: the frequency tracks
    # the strict-boundary oracle, not the inclusive one
    prob = QuantileProblem(uniform01, 0.5, 10, 0.2, "upper")
    cfg = SimConfig(seed=4, replicates=60_000, n=10, dist=uniform01, p=0.5)
    tail = empirical_tail(cfg, 0.2, "upper")
    strict = exact_tail(prob, "strict").value
    inclusive = exact_tail(prob, "inclusive").value
    assert tail.ci_low <= strict <= tail.ci_high
    assert inclusive > tail.ci_high  # the boundary pmf term is visible


def test_lower_side_matches_inclusive_at_integer_np(uniform01):
    # the lower-side event is the same under both formulations
    prob = QuantileProblem(uniform01, 0.5, 10, 0.2, "lower")
    cfg = SimConfig(seed=4, replicates=60_000, n=10, dist=uniform01, p=0.5)
    tail = empirical_tail(cfg, 0.2, "lower")
    inclusive = exact_tail(prob, "inclusive").value
    assert tail.ci_low <= inclusive <= tail.ci_high


def test_clt_sanity(uniform01):
    # mean of x_{n,p} within 4 asymptotic standard errors of x_p
    n, reps = 10_000, 2_000
    cfg = SimConfig(seed=6, replicates=reps, n=n, dist=uniform01, p=0.5)
    q = simulate_quantiles(cfg)
    se = math.sqrt(0.25 / n) / math.sqrt(reps)
    assert abs(q.mean() - 0.5) <= 4 * se


def test_order_statistic_law(uniform01):
    # empirical CDF of simulated quantiles matches the exact law within a
    # DKW-style envelope 4/sqrt(replicates)
    reps = 4000
    cfg = SimConfig(seed=13, replicates=reps, n=25, dist=uniform01, p=0.5)
    q = simulate_quantiles(cfg)
    for x in (0.35, 0.45, 0.5, 0.55, 0.65):
        emp = np.count_nonzero(q <= x) / reps
        law = sample_quantile_cdf(uniform01, 0.5, 25, x).value
        assert abs(emp - law) <= 4.0 / math.sqrt(reps)


def test_scaled_remainder_zero_case(uniform01):
    # a replicate whose sample straddles exactly (F_n(x_p) = p, x_{n,p} = x_p)
    # has zero remainder
    s = _scaled_remainders(
        qv=np.array([0.5]), below=np.array([5]), n=10, x_p=0.5, p=0.5, f_xp=1.0)
    assert s[0] == 0.0


def test_remainder_single_replicate_summaries(uniform01):
    cfg = SimConfig(seed=21, replicates=1, n=50, dist=uniform01, p=0.5)
    summary = bahadur_remainder_study(cfg, [50])[50]
    assert summary.median == summary.q90 == summary.max_abs


def test_remainder_study_validation(uniform01):
    cfg = SimConfig(seed=21, replicates=5, n=50, dist=uniform01, p=0.5)
    with pytest.raises(ParameterError):
        bahadur_remainder_study(cfg, [2, 50])


def test_remainder_scaling_is_stable(uniform01):
    cfg = SimConfig(seed=8, replicates=300, n=3, dist=uniform01, p=0.5)
    out = bahadur_remainder_study(cfg, [300, 3000])
    meds = [s.median for s in out.values()]
    assert all(m > 0 for m in meds)
    assert max(meds) / min(meds) < 10.0
