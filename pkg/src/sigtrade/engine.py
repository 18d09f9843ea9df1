"""Trading a signature strategy on sampled paths, performance statistics, and
learning a target position series as a linear functional of the signature."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, ShapeError, SingularMatrixError
from .market import MarketFactorPath
from .moments import source_channels
from .optimize import SigStrategy
from .signature import WordTable
from .words import LinearFunctional, Word, enumerate_words

ANNUALIZATION = math.sqrt(252.0)

_TABLES: dict[tuple[int, int], WordTable] = {}


def _table(channels: int, order: int) -> WordTable:
    key = (channels, order)
    if key not in _TABLES:
        _TABLES[key] = WordTable.dense(channels, order)
    return _TABLES[key]


def signature_features(path: MarketFactorPath, M: int) -> np.ndarray:
    """Row k is the order-M signature of the time-augmented path over nodes 0..k, k < n."""
    values = path.channels()
    table = _table(values.shape[1], M)
    rows = table.fold(np.diff(values, axis=0), record=True)
    return rows[:-1]


def _check_dims(strategy: SigStrategy, path: MarketFactorPath):
    if (strategy.d, strategy.N) != (path.d, path.N):
        raise ShapeError(
            f"strategy is for d={strategy.d}, N={strategy.N}; path has d={path.d}, N={path.N}")


def positions(strategy: SigStrategy, path: MarketFactorPath) -> np.ndarray:
    """Holdings over each interval [t_k, t_{k+1}), shape (n, d); row k only sees nodes 0..k."""
    _check_dims(strategy, path)
    return signature_features(path, strategy.M) @ strategy.coeffs.T


def max_drawdown(cum: np.ndarray) -> float:
    peak = np.maximum.accumulate(cum)
    return float(np.max(peak - cum)) if len(cum) else 0.0


def sharpe(pnl: np.ndarray, annualization: float = ANNUALIZATION) -> float:
    sd = float(np.std(pnl))
    return float(np.mean(pnl)) / sd * annualization if sd > 0 else 0.0


@dataclass
class BacktestResult:
    times: np.ndarray
    positions: np.ndarray
    pnl: np.ndarray
    cum_pnl: np.ndarray  # length n+1, starts at 0
    stats: dict = field(default_factory=dict)

    @property
    def terminal_pnl(self) -> float:
        return float(self.cum_pnl[-1])


def backtest(strategy: SigStrategy, path: MarketFactorPath,
             annualization: float = ANNUALIZATION) -> BacktestResult:
    xi = positions(strategy, path)
    dX = np.diff(path.assets, axis=0)
    pnl = np.einsum("km,km->k", xi, dX)
    cum = np.concatenate([[0.0], np.cumsum(pnl)])
    stats = {
        "mean": float(np.mean(pnl)),
        "variance": float(np.var(pnl)),
        "sharpe": sharpe(pnl, annualization),
        "max_drawdown": max_drawdown(cum),
        "terminal_pnl": float(cum[-1]),
    }
    return BacktestResult(np.asarray(path.times), xi, pnl, cum, stats)


def aggregate_stats(results) -> dict:
    results = list(results)
    if not results:
        raise DataError("no backtest results to aggregate")
    sh = np.array([r.stats["sharpe"] for r in results])
    term = np.array([r.terminal_pnl for r in results])
    dd = np.array([r.stats["max_drawdown"] for r in results])
    q = [0.05, 0.25, 0.5, 0.75, 0.95]
    return {
        "paths": len(results),
        "sharpe_mean": float(sh.mean()),
        "sharpe_std": float(sh.std()),
        "sharpe_quantiles": dict(zip([f"{x:g}" for x in q], np.quantile(sh, q).tolist())),
        "terminal_pnl_mean": float(term.mean()),
        "terminal_pnl_variance": float(term.var()),
        "max_drawdown_mean": float(dd.mean()),
    }


@dataclass
class FitReport:
    M: int
    channels: int
    coeffs: np.ndarray
    r2: float
    residual_variance: float

    @property
    def words(self) -> list[Word]:
        return enumerate_words(self.channels, self.M)

    @property
    def functional(self) -> LinearFunctional:
        return LinearFunctional.from_vector(self.coeffs, self.words, self.channels)

    def to_dict(self) -> dict:
        return {"M": self.M, "channels": self.channels, "words": [list(w) for w in self.words],
                "coeffs": self.coeffs.tolist(), "r2": self.r2,
                "residual_variance": self.residual_variance}


def _r2(y: np.ndarray, resid: np.ndarray) -> float:
    ssr = float(resid @ resid)
    yc = y - y.mean()
    sst = float(yc @ yc)
    # a constant target: SST is zero up to rounding in the mean
    tol = (len(y) * np.finfo(float).eps * max(1.0, float(np.abs(y).max()))) ** 2
    if sst <= tol:
        return 1.0 if ssr <= tol else 0.0
    return 1.0 - ssr / sst


def learn_functional(target, path: MarketFactorPath, M: int, ridge: float = 0.0) -> FitReport:
    """Least-squares fit of target positions on prefix-signature features.

    ``target`` has one value per decision time t_0..t_{n-1}. Columns are scaled
    to unit norm before solving; ridge is applied in the original coordinates.
    """
    if ridge < 0:
        raise ConfigError("ridge must be >= 0")
    y = np.asarray(target, dtype=float).reshape(-1)
    X = signature_features(path, M)
    if len(y) != len(X):
        raise ShapeError(f"target has {len(y)} values; path has {len(X)} decision times")
    norms = np.linalg.norm(X, axis=0)
    p = X.shape[1]
    if ridge == 0.0:
        if np.any(norms == 0):
            raise SingularMatrixError(
                f"feature columns {np.flatnonzero(norms == 0).tolist()} are identically zero; pass ridge > 0", 0.0)
        Xs = X / norms
        beta_s, _, rank, sv = np.linalg.lstsq(Xs, y, rcond=None)
        if rank < p:
            raise SingularMatrixError(
                f"design matrix has rank {rank} < {p} features; smallest singular value "
                f"{sv[-1]:.3e}; pass ridge > 0", float(sv[-1]))
        beta = beta_s / norms
    else:
        Xa = np.vstack([X, math.sqrt(ridge) * np.eye(p)])
        ya = np.concatenate([y, np.zeros(p)])
        beta = np.linalg.lstsq(Xa, ya, rcond=None)[0]
    resid = y - X @ beta
    return FitReport(M, path.channels().shape[1], beta, _r2(y, resid), float(np.var(resid)))
