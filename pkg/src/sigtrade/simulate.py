"""Seeded Euler-Maruyama simulators and the MACD momentum target.

Normal variates come from numpy's PCG64 bit generator; sample i of a set uses
the i-th child of ``SeedSequence(seed)``, so a set is reproducible as a whole
and any single sample can be regenerated on its own.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import ConfigError, DataError, InstabilityError
from .market import MarketFactorPath, SampleSet

GENERATOR = "numpy.PCG64"
MODELS = ("pairs", "signal", "walk")


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    n_steps: int = 252
    dt: float = 1.0 / 252
    sigma_x: float = 0.2
    sigma_y: float = 0.2
    sigma_f: float = 0.2
    kappa: float = 5.0
    alpha: float = 10.0
    x0: float = 1.0
    y0: float = 1.0
    f0: float = 0.0
    macd_fast: int = 10
    macd_slow: int = 20
    sigmoid_scale: float = 1.0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ConfigError("n_steps must be >= 1")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        for name in ("sigma_x", "sigma_y", "sigma_f", "kappa", "alpha"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not self.macd_fast < self.macd_slow:
            raise ConfigError("macd_fast must be < macd_slow")

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown simulation parameters {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def _check_stable(cfg: SimConfig):
    if cfg.kappa * cfg.dt >= 2:
        raise InstabilityError(
            f"kappa*dt = {cfg.kappa * cfg.dt:g} >= 2: the explicit scheme diverges; reduce dt")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _times(cfg: SimConfig) -> np.ndarray:
    return np.arange(cfg.n_steps + 1) * cfg.dt


def simulate_pairs(cfg: SimConfig, rng=None) -> MarketFactorPath:
    """Random-walk X and a follower Y pulled toward X at rate kappa (d=2, N=0)."""
    _check_stable(cfg)
    rng = rng if rng is not None else _rng(cfg.seed)
    n, dt = cfg.n_steps, cfg.dt
    xi = rng.standard_normal((n, 2))
    X = np.empty(n + 1)
    Y = np.empty(n + 1)
    X[0], Y[0] = cfg.x0, cfg.y0
    sq = math.sqrt(dt)
    for k in range(n):
        X[k + 1] = X[k] + cfg.sigma_x * sq * xi[k, 0]
        Y[k + 1] = Y[k] + cfg.kappa * (X[k] - Y[k]) * dt + cfg.sigma_y * sq * xi[k, 1]
    return MarketFactorPath(_times(cfg), np.column_stack([X, Y]), None)


def simulate_signal_market(cfg: SimConfig, rng=None, return_latent: bool = False):
    """Asset X whose drift is an exponentially weighted sum of past factor moves (d=1, N=1).

    The drift Z is latent: only (t, X, f) is returned, plus Z when asked.
    """
    _check_stable(cfg)
    rng = rng if rng is not None else _rng(cfg.seed)
    n, dt = cfg.n_steps, cfg.dt
    xi = rng.standard_normal((n, 2))
    f = np.empty(n + 1)
    Z = np.empty(n + 1)
    X = np.empty(n + 1)
    f[0], Z[0], X[0] = cfg.f0, 0.0, cfg.x0
    decay = math.exp(-cfg.alpha * dt)
    sq = math.sqrt(dt)
    for k in range(n):
        f[k + 1] = f[k] - cfg.kappa * f[k] * dt + cfg.sigma_f * sq * xi[k, 0]
        X[k + 1] = X[k] + Z[k] * dt + cfg.sigma_x * sq * xi[k, 1]
        Z[k + 1] = decay * (Z[k] + (f[k + 1] - f[k]))
    path = MarketFactorPath(_times(cfg), X, f[:, None])
    return (path, Z) if return_latent else path


def simulate_walk(cfg: SimConfig, rng=None) -> MarketFactorPath:
    """Single driftless arithmetic random walk (d=1, N=0)."""
    rng = rng if rng is not None else _rng(cfg.seed)
    steps = cfg.sigma_x * math.sqrt(cfg.dt) * rng.standard_normal(cfg.n_steps)
    X = cfg.x0 + np.concatenate([[0.0], np.cumsum(steps)])
    return MarketFactorPath(_times(cfg), X, None)


SIMULATORS = {"pairs": simulate_pairs, "signal": simulate_signal_market, "walk": simulate_walk}


def simulate_samples(model: str, cfg: SimConfig, count: int, offset: int = 0) -> SampleSet:
    """``count`` independent paths; path i uses child stream ``offset + i`` of the seed."""
    if model not in SIMULATORS:
        raise ConfigError(f"unknown model {model!r}; choose from {MODELS}")
    if count < 1:
        raise ConfigError("count must be >= 1")
    children = np.random.SeedSequence(cfg.seed).spawn(offset + count)[offset:]
    sim = SIMULATORS[model]
    return SampleSet(tuple(sim(cfg, _rng(c)) for c in children))


def ewma(x: np.ndarray, span: int) -> np.ndarray:
    a = 2.0 / (span + 1.0)
    out = np.empty(len(x))
    out[0] = x[0]
    for k in range(1, len(x)):
        out[k] = out[k - 1] + a * (x[k] - out[k - 1])
    return out


def macd(prices, fast: int, slow: int) -> np.ndarray:
    """Fast minus slow exponential moving average, both started at the first price."""
    p = np.asarray(prices, dtype=float).reshape(-1)
    if not fast < slow:
        raise ConfigError(f"fast span {fast} must be below slow span {slow}")
    if len(p) <= slow:
        raise DataError(f"series of length {len(p)} too short for span {slow}")
    return ewma(p, fast) - ewma(p, slow)


def momentum_positions(prices, fast: int, slow: int, L: float = 1.0, scale: float | None = None) -> np.ndarray:
    """Centred sigmoid of the scaled MACD, 2*sigmoid(L*macd/scale) - 1, in (-1, 1).

    ``scale`` defaults to the standard deviation of the MACD series (or 1 if it is flat).
    """
    m = macd(prices, fast, slow)
    if scale is None:
        sd = float(m.std())
        scale = sd if sd > 0 else 1.0
    if not scale > 0:
        raise ConfigError("scale must be positive")
    return np.tanh(0.5 * L * m / scale)
