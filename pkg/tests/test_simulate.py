import math

import numpy as np
import pytest

from sigtrade.errors import ConfigError, DataError, InstabilityError
from sigtrade.simulate import (SimConfig, macd, momentum_positions, simulate_pairs, simulate_samples,
                               simulate_signal_market)


class FixedNormals:
    def __init__(self, arr):
        self.arr = np.asarray(arr, float)

    def standard_normal(self, shape):
        return self.arr.reshape(shape)


def test_pairs_deterministic_decay():
    cfg = SimConfig(n_steps=30, sigma_x=0, sigma_y=0, kappa=4.0, y0=2.0)
    p = simulate_pairs(cfg)
    k = np.arange(31)
    np.testing.assert_allclose(p.assets[:, 1], 1 + (2 - 1) * (1 - 4.0 / 252) ** k, rtol=1e-13)
    np.testing.assert_array_equal(p.assets[:, 0], 1.0)


def test_pairs_driftless_when_uncoupled():
    cfg = SimConfig(n_steps=5, kappa=0.0)
    S = simulate_samples("pairs", cfg, 10000)
    inc = np.array([p.assets[-1] - p.assets[0] for p in S])
    se = inc.std(axis=0) / math.sqrt(len(inc))
    assert np.all(np.abs(inc.mean(axis=0)) < 3 * se)


def test_pairs_spread_mean_reverts():
    p = simulate_pairs(SimConfig(n_steps=20000, kappa=20.0, seed=3))
    ds = np.diff(p.assets[:, 1] - p.assets[:, 0])
    assert np.corrcoef(ds[:-1], ds[1:])[0, 1] < 0


def test_instability_guard():
    with pytest.raises(InstabilityError):
        simulate_pairs(SimConfig(kappa=600.0))


def test_signal_no_decay_telescopes():
    p, Z = simulate_signal_market(SimConfig(n_steps=50, alpha=0.0, seed=2), return_latent=True)
    f = p.factors[:, 0]
    np.testing.assert_allclose(Z, f - f[0], atol=1e-13)


def test_signal_flat_factor():
    p, Z = simulate_signal_market(SimConfig(n_steps=50, sigma_f=0.0), return_latent=True)
    assert np.all(Z == 0)
    assert p.factors.shape == (51, 1)


def test_signal_impulse_decays_geometrically():
    n, dt, alpha = 8, 1 / 252, 10.0
    xi = np.zeros((n, 2))
    xi[0, 0] = 1.0
    cfg = SimConfig(n_steps=n, dt=dt, sigma_x=0.0, sigma_f=1 / math.sqrt(dt), kappa=0.0, alpha=alpha)
    p = simulate_signal_market(cfg, rng=FixedNormals(xi))
    dx = np.diff(p.assets[:, 0])
    assert dx[0] == 0.0
    np.testing.assert_allclose(dx[2:] / dx[1:-1], math.exp(-alpha * dt), rtol=1e-12)


def test_determinism():
    a = simulate_samples("signal", SimConfig(seed=9, n_steps=20), 3)
    b = simulate_samples("signal", SimConfig(seed=9, n_steps=20), 3)
    for p, q in zip(a, b):
        assert p.assets.tobytes() == q.assets.tobytes()
        assert p.factors.tobytes() == q.factors.tobytes()
    c = simulate_samples("signal", SimConfig(seed=9, n_steps=20), 2, offset=1)
    assert c[0].assets.tobytes() == a[1].assets.tobytes()


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(sigma_x=-1)
    with pytest.raises(ConfigError):
        SimConfig(macd_fast=20, macd_slow=10)
    with pytest.raises(ConfigError):
        SimConfig.from_dict({"sigma": 1})
    with pytest.raises(ConfigError):
        simulate_samples("heston", SimConfig(), 1)


def test_macd_examples():
    assert np.all(macd(np.full(40, 3.0), 10, 20) == 0)
    ramp = macd(np.arange(400.0), 10, 20)
    # steady-state lag of an EWMA on a unit ramp is (span - 1) / 2
    assert ramp[-1] == pytest.approx(5.0, rel=1e-9)
    with pytest.raises(DataError):
        macd(np.ones(20), 10, 20)
    with pytest.raises(ConfigError):
        macd(np.ones(50), 20, 10)


def test_macd_sign_changes_at_reversal():
    p = np.concatenate([np.linspace(1, 2, 60), np.linspace(2, 1, 60)])
    m = macd(p, 10, 20)
    assert m[55] > 0 and m[-1] < 0


def test_momentum_positions():
    assert np.all(momentum_positions(np.full(30, 2.0), 5, 10) == 0)
    p = 1 + np.cumsum(np.random.default_rng(0).standard_normal(80)) * 0.01
    m = macd(p, 5, 10)
    big = momentum_positions(p, 5, 10, L=1e6)
    np.testing.assert_allclose(big[np.abs(m) > 1e-6], np.sign(m[np.abs(m) > 1e-6]))
    pos = momentum_positions(p, 5, 10, L=2.0, scale=0.01)
    order = np.argsort(m)
    assert np.all(np.diff(pos[order]) >= 0)
    assert np.all(np.abs(pos) < 1)
