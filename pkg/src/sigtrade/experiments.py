"""Synthetic-market experiments: pairs trading, exogenous signal, momentum learning.

Each experiment is a frozen config plus a ``run`` function returning a plain
dict, shared by the scripts in ``scripts/`` and the acceptance tests.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .engine import aggregate_stats, backtest, learn_functional, signature_features
from .market import MarketFactorPath, SampleSet
from .moments import fit_moments
from .optimize import SigStrategy, evaluate, solve
from .simulate import SimConfig, momentum_positions, simulate_samples


def strip_factors(samples: SampleSet) -> SampleSet:
    return SampleSet(tuple(MarketFactorPath(p.times, p.assets, None) for p in samples))


def _sharpe_by_order(moments, test: SampleSet, orders, delta: float) -> dict:
    out = {}
    for M in orders:
        strat = solve(moments.truncate(M), delta)
        out[M] = aggregate_stats(backtest(strat, p) for p in test)["sharpe_mean"]
    return out


@dataclass(frozen=True)
class PairsExperiment:
    sim: SimConfig = field(default_factory=SimConfig)
    n_train: int = 500
    n_test: int = 500
    max_order: int = 3
    sharpe_orders: tuple = (0, 1, 3)
    delta: float = 0.01
    frontier_deltas: tuple = (0.0025, 0.005, 0.01, 0.02, 0.04)


def run_pairs(cfg: PairsExperiment = PairsExperiment()) -> dict:
    t0 = time.perf_counter()
    train = simulate_samples("pairs", cfg.sim, cfg.n_train)
    test = simulate_samples("pairs", cfg.sim, cfg.n_test, offset=cfg.n_train)
    mom = fit_moments(train, cfg.max_order)
    t_fit = time.perf_counter() - t0
    frontier = {M: [evaluate(solve(mom.truncate(M), x), mom.truncate(M))[0] for x in cfg.frontier_deltas]
                for M in range(cfg.max_order + 1)}
    sharpe = _sharpe_by_order(mom, test, cfg.sharpe_orders, cfg.delta)
    return {"sharpe_mean": sharpe, "frontier_expected_pnl": frontier,
            "frontier_deltas": list(cfg.frontier_deltas), "fit_seconds": t_fit,
            "seconds": time.perf_counter() - t0, "config": asdict(cfg)}


SIGNAL_SIM = SimConfig(sigma_f=1.5, sigma_x=0.5, kappa=5.0, alpha=10.0)


@dataclass(frozen=True)
class SignalExperiment:
    sim: SimConfig = SIGNAL_SIM
    n_train: int = 1000
    n_test: int = 500
    max_order: int = 2
    endogenous_order: int = 2
    delta: float = 0.01


def run_signal(cfg: SignalExperiment = SignalExperiment()) -> dict:
    t0 = time.perf_counter()
    train = simulate_samples("signal", cfg.sim, cfg.n_train)
    test = simulate_samples("signal", cfg.sim, cfg.n_test, offset=cfg.n_train)
    mom = fit_moments(train, cfg.max_order)
    with_signal = _sharpe_by_order(mom, test, range(cfg.max_order + 1), cfg.delta)
    endo = fit_moments(strip_factors(train), cfg.endogenous_order)
    endogenous = _sharpe_by_order(endo, strip_factors(test), range(cfg.endogenous_order + 1), cfg.delta)
    return {"sharpe_mean": with_signal, "endogenous_sharpe_mean": endogenous,
            "seconds": time.perf_counter() - t0, "config": asdict(cfg)}


@dataclass(frozen=True)
class MomentumExperiment:
    sim: SimConfig = SimConfig(seed=11)
    orders: tuple = (1, 2, 3)
    fast: int = 10
    slow: int = 20
    L: float = 1.0
    planted_order: int = 2
    planted_seed: int = 5
    compare_paths: int = 300
    delta: float = 0.01


def run_momentum(cfg: MomentumExperiment = MomentumExperiment()) -> dict:
    path = simulate_samples("walk", cfg.sim, 1)[0]
    target = momentum_positions(path.assets[:, 0], cfg.fast, cfg.slow, cfg.L)[:-1]
    fits = {M: learn_functional(target, path, M) for M in cfg.orders}

    rng = np.random.Generator(np.random.PCG64(cfg.planted_seed))
    feats = signature_features(path, cfg.planted_order)
    planted = rng.standard_normal(feats.shape[1])
    rec = learn_functional(feats @ planted, path, cfg.planted_order)

    # learned momentum vs optimal functional at equal variance, on walk moments
    M = max(cfg.orders)
    samples = simulate_samples("walk", SimConfig(seed=cfg.sim.seed + 1, n_steps=cfg.sim.n_steps,
                                                 dt=cfg.sim.dt, sigma_x=cfg.sim.sigma_x),
                               cfg.compare_paths)
    mom = fit_moments(samples, M)
    optimal = solve(mom, cfg.delta)
    learned = fits[M].coeffs
    q = float(learned @ mom.sigma @ learned)
    learned = learned * math.sqrt(cfg.delta / q)
    return {
        "r2": {M: f.r2 for M, f in fits.items()},
        "planted_r2": rec.r2,
        "planted_max_coeff_error": float(np.max(np.abs(rec.coeffs - planted))),
        "optimal_expected_pnl": evaluate(optimal, mom)[0],
        "learned_expected_pnl": evaluate(learned, mom)[0],
        "config": asdict(cfg),
    }
