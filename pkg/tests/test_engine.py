import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sigtrade.engine import (aggregate_stats, backtest, learn_functional, positions,
                             signature_features)
from sigtrade.errors import ShapeError, SingularMatrixError
from sigtrade.market import MarketFactorPath
from sigtrade.moments import fit_moments, shift_letter
from sigtrade.optimize import SigStrategy, evaluate, solve
from sigtrade.signature import lead_lag, signature_of_path
from sigtrade.simulate import SimConfig, simulate_samples
from sigtrade.words import LinearFunctional, count_words, pair


def strategy(d, N, M, coeffs):
    return SigStrategy(d, N, M, np.asarray(coeffs, float).reshape(d, -1))


def walk(n=12, d=1, N=0, seed=0):
    rng = np.random.default_rng(seed)
    X = 1 + np.vstack([np.zeros(d), np.cumsum(0.05 * rng.standard_normal((n, d)), 0)])
    f = np.vstack([np.zeros(N), np.cumsum(rng.standard_normal((n, N)), 0)])
    return MarketFactorPath(np.arange(n + 1) / 252, X, f)


def test_positions_examples():
    p = walk()
    W = count_words(2, 1)
    s = strategy(1, 0, 1, [0.7, 0, 0])
    np.testing.assert_array_equal(positions(s, p), 0.7)
    s = strategy(1, 0, 1, [0, 1.0, 0])
    np.testing.assert_allclose(positions(s, p)[:, 0], p.times[:-1] - p.times[0], atol=1e-15)
    s = strategy(1, 0, 2, np.arange(7.0) + 1)
    assert positions(s, p)[0, 0] == 1.0
    with pytest.raises(ShapeError):
        positions(strategy(2, 0, 0, [1, 1]), p)


def test_backtest_examples():
    p = walk()
    r = backtest(strategy(1, 0, 0, [1.0]), p)
    assert r.terminal_pnl == pytest.approx(p.assets[-1, 0] - p.assets[0, 0], rel=1e-13)
    z = backtest(strategy(1, 0, 1, [0, 0, 0]), p)
    assert z.terminal_pnl == 0 and z.stats["sharpe"] == 0 and z.stats["max_drawdown"] == 0


def test_drawdown_on_cumulative():
    p = MarketFactorPath([0, 1, 2, 3], [1.0, 2.0, 0.5, 1.0], None)
    r = backtest(strategy(1, 0, 0, [1.0]), p)
    np.testing.assert_allclose(r.cum_pnl, [0, 1, -0.5, 0])
    assert r.stats["max_drawdown"] == pytest.approx(1.5)


@st.composite
def strategy_and_path(draw):
    d = draw(st.integers(1, 2))
    N = draw(st.integers(0, 1))
    M = draw(st.integers(0, 2))
    n = draw(st.integers(1, 20))
    coeffs = draw(arrays(float, d * count_words(N + d + 1, M), elements=st.floats(-3, 3)))
    return strategy(d, N, M, coeffs), walk(n, d, N, draw(st.integers(0, 1000)))


def pnl_via_lead_lag(s, p):
    S = signature_of_path(lead_lag(p.channels()), s.M + 1)
    C = 2 * (s.N + s.d + 1)
    total = 0.0
    for m, ell in enumerate(s.functionals(), start=1):
        lifted = LinearFunctional(C, dict(ell.terms)).concat((shift_letter(m, s.d, s.N),))
        total += pair(lifted, S)
    return total


@given(strategy_and_path())
def test_pnl_identity(case):
    s, p = case
    got = backtest(s, p).terminal_pnl
    assert pnl_via_lead_lag(s, p) == pytest.approx(got, rel=1e-9, abs=1e-12)


@given(strategy_and_path(), st.data())
def test_no_look_ahead(case, data):
    s, p = case
    k = data.draw(st.integers(0, p.n_increments - 1))
    X = p.assets.copy()
    X[k + 1:] += data.draw(st.floats(-1, 1))
    q = MarketFactorPath(p.times, X, p.factors)
    np.testing.assert_array_equal(positions(s, p)[:k + 1], positions(s, q)[:k + 1])


def test_aggregate_stats():
    p = walk()
    s = strategy(1, 0, 1, [1.0, 2.0, 3.0])
    r = backtest(s, p)
    agg = aggregate_stats([r, r, r])
    assert agg["sharpe_std"] == 0 and agg["terminal_pnl_variance"] == 0
    paths = simulate_samples("walk", SimConfig(n_steps=30), 500)
    z = aggregate_stats(backtest(strategy(1, 0, 1, [0, 0, 0]), q) for q in paths)
    assert z["sharpe_mean"] == 0 and z["terminal_pnl_mean"] == 0 and z["max_drawdown_mean"] == 0


def test_in_sample_consistency():
    S = simulate_samples("pairs", SimConfig(n_steps=40, seed=2), 60)
    mom = fit_moments(S, 1)
    s = solve(mom, 0.02)
    agg = aggregate_stats(backtest(s, p) for p in S)
    e, v = evaluate(s, mom)
    assert agg["terminal_pnl_mean"] == pytest.approx(e, rel=1e-6)
    assert agg["terminal_pnl_variance"] == pytest.approx(v, rel=1e-6)


def test_learn_planted():
    p = walk(60, 1, 1, seed=3)
    F = signature_features(p, 2)
    ell0 = np.random.default_rng(1).standard_normal(F.shape[1])
    rep = learn_functional(F @ ell0, p, 2)
    assert rep.r2 >= 1 - 1e-12
    np.testing.assert_allclose(rep.coeffs, ell0, rtol=1e-8, atol=1e-8)


def test_learn_constant_target():
    p = walk(30)
    rep = learn_functional(np.full(30, 0.4), p, 2)
    assert rep.r2 == 1.0
    assert rep.coeffs[0] == pytest.approx(0.4, rel=1e-10)
    np.testing.assert_allclose(rep.coeffs[1:], 0, atol=1e-8)


def test_learn_rank_deficient():
    p = walk(3)
    with pytest.raises(SingularMatrixError):
        learn_functional(np.arange(3.0), p, 2)
    rep = learn_functional(np.arange(3.0), p, 2, ridge=1e-6)
    assert rep.r2 <= 1
