import math

import numpy as np
import pytest
from scipy import stats

import kactails as kt

S1_KAC = 4.0 / math.pi - 1.0
LAMBDA_15 = math.pi / (2.0 * math.gamma(1.5) * math.sin(0.75 * math.pi))


def rng(seed=0):
    return np.random.default_rng(seed)


def det_kernel(a=1.5):
    return kt.DeterministicKernel(2 ** (-1 / a), 2 ** (-1 / a))


def test_all_ones_pool_is_fixed_under_conservative_kernel():
    pool = kt.ZPool.ones(1000, 1.5, 0.0)
    out = kt.zpool_iterate(pool, det_kernel(), rng(1))
    np.testing.assert_allclose(out.samples, 1.0, atol=1e-14)


def test_pool_variance_halves_under_conservative_kernel():
    g = rng(2)
    pool = kt.ZPool.from_samples(g.standard_exponential(100_000), 1.5, 0.0)
    prev = pool.samples.var(ddof=1)
    for _ in range(8):
        pool = kt.zpool_iterate(pool, det_kernel(), g)
        var = pool.samples.var(ddof=1)
        assert abs(var / prev - 0.5) <= 0.05  # within 10% of halving
        prev = var


def test_pool_mean_is_preserved():
    g = rng(3)
    pool = kt.ZPool.ones(100_000, 1.0, S1_KAC)
    for _ in range(5):
        new = kt.zpool_iterate(pool, kt.KacKernel(), g)
        drift = new.samples.mean() - pool.samples.mean()
        se = math.hypot(new.samples.std(ddof=1), pool.samples.std(ddof=1)) \
            / math.sqrt(new.samples.size)
        assert abs(drift) <= 4 * max(se, 1e-12)
        assert abs(new.samples.mean() - 1.0) <= 4 * max(se, 1e-12)
        pool = new


def test_pool_higher_moment_stays_bounded():
    # E[Z^(delta/alpha)] with delta = 2, alpha = 1: second moment bounded
    g = rng(4)
    pool = kt.ZPool.ones(50_000, 1.0, S1_KAC)
    m2 = []
    for _ in range(30):
        pool = kt.zpool_iterate(pool, kt.KacKernel(), g)
        m2.append(float(np.mean(pool.samples ** 2)))
    m2 = np.array(m2)
    assert m2.max() <= 2.0 * np.median(m2)


def test_zpool_validation():
    with pytest.raises(ValueError):
        kt.ZPool.from_samples([], 1.0, 0.0)
    with pytest.raises(ValueError):
        kt.ZPool.from_samples([-1.0, 1.0], 1.0, 0.0)
    pool = kt.ZPool.ones(10, 1.0, -1.5)
    with pytest.raises(ValueError):
        kt.zpool_iterate(pool, kt.KacKernel(), rng(0))


def test_tree_pool_conservative_kernel_is_degenerate():
    pool = kt.zpool_from_trees(det_kernel(), 1.5, 6.0, 2000, rng(5))
    np.testing.assert_allclose(pool.samples, 1.0, atol=1e-9)


def test_tree_pool_mean_one():
    pool = kt.zpool_from_trees(kt.KacKernel(), 1.0, 6.0, 50_000, rng(6))
    se = pool.samples.std(ddof=1) / math.sqrt(pool.samples.size)
    assert abs(pool.samples.mean() - 1.0) <= 4 * se


def test_tree_pool_warns_at_small_t():
    with pytest.warns(UserWarning):
        kt.zpool_from_trees(kt.KacKernel(), 1.0, 0.5, 2000, rng(7))


def test_tree_and_fixed_point_pools_agree():
    g = rng(8)
    fixed = kt.zpool_iterate(kt.ZPool.ones(40_000, 1.0, S1_KAC),
                             kt.KacKernel(), g, iterations=60)
    tree = kt.zpool_from_trees(kt.KacKernel(), 1.0, 7.0, 40_000, g)
    d = stats.ks_2samp(fixed.samples, tree.samples)
    assert d.statistic <= 0.03


def test_pool_export_roundtrip(tmp_path):
    pool = kt.ZPool.from_samples([0.5, 1.5, 1.0], 1.0, S1_KAC)
    binpath = tmp_path / "pool.f64"
    csvpath = tmp_path / "pool.csv"
    pool.to_binary(binpath)
    pool.to_csv(csvpath)
    back = np.fromfile(binpath, dtype="<f8")
    np.testing.assert_array_equal(back, pool.samples)
    back_csv = np.loadtxt(csvpath)
    np.testing.assert_array_equal(back_csv, pool.samples)


def test_stable_params_values():
    p = kt.stable_params(0.5, 0.5, 1.5)
    assert abs(p.lam - LAMBDA_15) < 1e-12
    assert abs(p.lam - 2.5066282746310002) < 1e-12
    assert p.eta_skew == 0.0
    assert kt.stable_params(0.7, 0.0, 1.5).eta_skew == 1.0
    c = kt.stable_params(0.5, 0.5, 1.0, gamma0=0.0)
    assert abs(c.cauchy_scale - math.pi / 2.0) < 1e-12
    assert c.gamma0 == 0.0
    with pytest.raises(ValueError):
        kt.stable_params(0.6, 0.4, 1.0)
    with pytest.raises(ValueError):
        kt.stable_params(0.0, 0.0, 1.5)


def test_stable_sampler_characteristic_function():
    # degenerate pool: pure stable draws; empirical CF vs exp(-lam |xi|^a)
    g = rng(9)
    pool = kt.ZPool.ones(100, 1.5, 0.0)
    params = kt.stable_params(0.5, 0.5, 1.5)
    v = kt.sample_V_infinity(pool, params, g, size=100_000)
    for xi in (0.5, 1.0, 2.0):
        emp = np.exp(1j * xi * v).mean()
        assert abs(emp - math.exp(-params.lam * xi ** 1.5)) <= 0.02, xi
    # symmetric case: median straddles zero
    frac = (v > 0).mean()
    assert abs(frac - 0.5) <= 4 * 0.5 / math.sqrt(v.size)


def test_stable_sampler_skewed_characteristic_function():
    g = rng(10)
    pool = kt.ZPool.ones(100, 1.5, 0.0)
    params = kt.stable_params(0.8, 0.2, 1.5)
    v = kt.sample_V_infinity(pool, params, g, size=200_000)
    for xi in (0.5, 1.0, -1.0):
        emp = np.exp(1j * xi * v).mean()
        target = kt.cf_V_infinity(xi, pool, params)
        assert abs(emp - target) <= 0.02, xi


def test_limit_tail_recovers_c0():
    # x^a P{|V_inf| > x} -> c0; at x = 30 the second-order term is ~2.6%
    g = rng(11)
    pool = kt.ZPool.ones(100, 1.5, 0.0)
    params = kt.stable_params(0.5, 0.5, 1.5)
    v = kt.sample_V_infinity(pool, params, g, size=10_000_000)
    ratio = 30.0 ** 1.5 * (np.abs(v) > 30.0).mean()
    assert abs(ratio - 1.0) <= 0.15


def test_cauchy_composition_matches_characteristic_function():
    g = rng(12)
    pool = kt.zpool_iterate(kt.ZPool.ones(50_000, 1.0, S1_KAC),
                            kt.KacKernel(), g, iterations=40)
    params = kt.stable_params(0.5, 0.5, 1.0, gamma0=0.3)
    v = kt.sample_V_infinity(pool, params, g, size=200_000)
    for xi in (0.5, 1.0, 2.0):
        emp = np.exp(1j * xi * v).mean()
        target = kt.cf_V_infinity(xi, pool, params)
        assert abs(emp - target) <= 0.02, xi


def test_cf_properties():
    pool = kt.ZPool.from_samples(rng(13).standard_exponential(5000), 1.5, 0.0)
    params = kt.stable_params(0.5, 0.5, 1.5)
    assert kt.cf_V_infinity(0.0, pool, params) == 1.0 + 0.0j
    grid = np.array([-2.0, -0.5, 0.3, 1.7])
    vals = kt.cf_V_infinity(grid, pool, params)
    assert np.all(np.abs(vals) <= 1.0 + 1e-12)
    # Hermitian symmetry and zero imaginary part in the symmetric case
    conj = kt.cf_V_infinity(-grid, pool, params)
    np.testing.assert_allclose(vals, np.conj(conj), rtol=0, atol=1e-12)
    np.testing.assert_allclose(vals.imag, 0.0, atol=1e-12)
    # closed form at a degenerate pool
    ones = kt.ZPool.ones(10, 1.5, 0.0)
    assert abs(kt.cf_V_infinity(1.0, ones, params)
               - math.exp(-params.lam)) < 1e-12


def test_cdf_H_infinity_branches():
    pool = kt.ZPool.ones(1000, 1.5, 0.0)
    assert kt.cdf_H_infinity(-1.0, pool, 1.0, 1.5) == 0.0
    assert kt.cdf_H_infinity(0.0, pool, 1.0, 1.5) == 0.0  # P{Z = 0} = 0
    # degenerate mixing gives the bare Frechet law
    for x in (0.5, 1.0, 3.0):
        assert abs(kt.cdf_H_infinity(x, pool, 1.0, 1.5)
                   - math.exp(-x ** -1.5)) < 1e-12
    assert kt.cdf_H_infinity(1e9, pool, 1.0, 1.5) > 1.0 - 1e-9
    withzeros = kt.ZPool.from_samples([0.0, 0.0, 1.0, 1.0], 1.5, 0.0)
    assert kt.cdf_H_infinity(0.0, withzeros, 1.0, 1.5) == 0.5


def test_cdf_H_infinity_monotone_grid():
    pool = kt.ZPool.from_samples(rng(14).standard_exponential(20_000), 1.0, S1_KAC)
    xs = np.linspace(0.01, 20.0, 200)
    vals = [kt.cdf_H_infinity(x, pool, 1.0, 1.0) for x in xs]
    assert np.all(np.diff(vals) >= -1e-15)
    # right-continuous at 0 when the pool carries no mass at zero
    assert kt.cdf_H_infinity(0.0, pool, 1.0, 1.0) == 0.0
    assert kt.cdf_H_infinity(1e-9, pool, 1.0, 1.0) < 1e-12
