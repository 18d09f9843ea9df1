import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigtrade.errors import ConfigError, ShapeError, SingularMatrixError
from sigtrade.moments import SigMoments, fit_moments
from sigtrade.optimize import (SigStrategy, evaluate, frontier, markowitz_frontier, perturb_cloud,
                               solve)
from sigtrade.simulate import SimConfig, simulate_samples


def random_moments(seed, d=2, N=1, M=1):
    rng = np.random.default_rng(seed)
    n = d * sum((N + d + 1) ** k for k in range(M + 1))
    A = rng.standard_normal((n, n))
    return SigMoments(d, N, M, rng.standard_normal(n), A @ A.T / n + np.eye(n))


def test_scalar_example():
    m = SigMoments(1, 0, 0, [0.1], [[0.04]])
    s = solve(m, 0.04)
    assert s.flat[0] == pytest.approx(1.0, rel=1e-14)
    assert s.lam == pytest.approx(1.25, rel=1e-14)
    assert evaluate(s, m) == pytest.approx((0.1, 0.04), rel=1e-14)


def test_zero_mean_is_degenerate():
    m = SigMoments(1, 0, 0, [0.0], [[0.04]])
    s = solve(m, 0.01)
    assert s.degenerate and s.lam == 0.0 and not np.any(s.flat)


def test_singular_reports_smallest_value():
    m = SigMoments(2, 0, 0, [0.1, 0.2], [[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularMatrixError, match="smallest singular value") as e:
        solve(m, 0.1)
    assert e.value.smallest_singular_value is not None
    s = solve(m, 0.1, ridge=1e-3)
    assert evaluate(s, m)[1] == pytest.approx(0.1, rel=1e-10)


def test_bad_arguments():
    m = random_moments(0)
    with pytest.raises(ConfigError):
        solve(m, 0.0)
    with pytest.raises(ConfigError):
        frontier(m, [0.2, 0.1])
    with pytest.raises(ShapeError):
        evaluate(np.ones(3), m)


@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(0, 1), st.integers(0, 2),
       st.floats(1e-3, 10))
def test_kkt(seed, d, N, M, delta):
    m = random_moments(seed, d, N, M)
    s = solve(m, delta)
    e, v = evaluate(s, m)
    assert v == pytest.approx(delta, rel=1e-6)
    lhs = 2 * s.lam * m.sigma @ s.flat
    assert np.linalg.norm(lhs - m.mu) <= 1e-8 * np.linalg.norm(m.mu)


@given(st.integers(0, 10_000), st.floats(0.1, 5))
def test_delta_scaling(seed, c):
    m = random_moments(seed)
    a, b = solve(m, 0.01), solve(m, 0.01 * c * c)
    np.testing.assert_allclose(b.flat, c * a.flat, rtol=1e-10, atol=1e-14)


def test_frontier_shape():
    m = random_moments(3)
    grid = [0.01, 0.04, 0.09, 0.16]
    pts = frontier(m, grid)
    c = pts[0].expected_pnl / math.sqrt(pts[0].variance)
    for p, x in zip(pts, grid):
        assert p.variance == pytest.approx(x, rel=1e-9)
        assert p.expected_pnl == pytest.approx(c * math.sqrt(x), rel=1e-9)
    one = frontier(m, [0.04])[0]
    assert one.expected_pnl == pytest.approx(evaluate(solve(m, 0.04), m)[0], rel=1e-14)


def test_order_zero_frontier_is_markowitz():
    S = simulate_samples("pairs", SimConfig(n_steps=20), 200)
    m = fit_moments(S, 0)
    R = np.array([p.assets[-1] - p.assets[0] for p in S])
    mean, cov = R.mean(axis=0), np.cov(R.T, bias=True)
    grid = [0.001, 0.01]
    for a, b in zip(frontier(m, grid), markowitz_frontier(mean, cov, grid)):
        assert a.expected_pnl == pytest.approx(b.expected_pnl, rel=1e-8)
        assert a.variance == pytest.approx(b.variance, rel=1e-8)


def test_perturb_cloud():
    m = random_moments(5)
    s = solve(m, 0.5)
    opt = evaluate(s, m)[0]
    same = perturb_cloud(s, m, 5, 0.0)
    assert all(p.expected_pnl == pytest.approx(opt, rel=1e-12) for p in same)
    cloud = perturb_cloud(s, m, 500, 0.7, seed=1)
    assert all(p.variance == pytest.approx(0.5, rel=1e-6) for p in cloud)
    assert max(p.expected_pnl for p in cloud) <= opt + 1e-8


def test_strategy_round_trip():
    m = random_moments(1, 2, 1, 2)
    s = solve(m, 0.2)
    assert s.coeffs.shape == (2, 21)
    t = SigStrategy.from_dict(s.to_dict())
    assert np.array_equal(t.coeffs, s.coeffs) and t.lam == s.lam
    ells = s.functionals()
    back = SigStrategy.from_functionals(ells, 2, 1, 2)
    np.testing.assert_array_equal(back.coeffs, s.coeffs)
