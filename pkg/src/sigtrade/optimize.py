"""Closed-form mean-variance optimal signature strategy, evaluation and frontiers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError, SingularMatrixError
from .moments import SigMoments, source_channels
from .words import WORD_ORDER_TAG, LinearFunctional, Word, count_words, enumerate_words


@dataclass(frozen=True)
class SigStrategy:
    """One linear functional per asset, stored as a (d, |W|) coefficient array."""

    d: int
    N: int
    M: int
    coeffs: np.ndarray
    lam: float = 0.0
    delta: float = 0.0
    degenerate: bool = False
    ridge: float = 0.0
    moments_id: str = ""

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        n = count_words(source_channels(self.d, self.N), self.M)
        if c.ndim == 1:
            c = c.reshape(self.d, -1) if c.size == self.d * n else c
        if c.shape != (self.d, n):
            raise ShapeError(f"strategy coefficients of shape {c.shape}, expected ({self.d}, {n})")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def channels(self) -> int:
        return source_channels(self.d, self.N)

    @property
    def words(self) -> list[Word]:
        return enumerate_words(self.channels, self.M)

    @property
    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def functionals(self) -> list[LinearFunctional]:
        W = self.words
        return [LinearFunctional.from_vector(row, W, self.channels) for row in self.coeffs]

    @classmethod
    def from_functionals(cls, ells, d: int, N: int, M: int, **meta) -> "SigStrategy":
        W = enumerate_words(source_channels(d, N), M)
        return cls(d, N, M, np.array([ell.to_vector(W) for ell in ells]), **meta)

    def to_dict(self) -> dict:
        return {
            "kind": "sig_strategy",
            "d": self.d, "N": self.N, "M": self.M,
            "word_order": WORD_ORDER_TAG,
            "words": [list(w) for w in self.words],
            "coeffs": self.coeffs.tolist(),
            "lambda": self.lam,
            "delta": self.delta,
            "degenerate": self.degenerate,
            "ridge": self.ridge,
            "moments_id": self.moments_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SigStrategy":
        if d.get("word_order") != WORD_ORDER_TAG:
            raise ShapeError(f"unsupported word order {d.get('word_order')!r}")
        return cls(int(d["d"]), int(d["N"]), int(d["M"]), np.array(d["coeffs"], dtype=float),
                   float(d["lambda"]), float(d["delta"]), bool(d.get("degenerate", False)),
                   float(d.get("ridge", 0.0)), str(d.get("moments_id", "")))


@dataclass(frozen=True)
class FrontierPoint:
    expected_pnl: float
    variance: float
    label: str = ""


def equilibrated_solve(A: np.ndarray, b: np.ndarray, rcond: float | None = None):
    """Solve A x = b for symmetric A via symmetric diagonal scaling and an SVD.

    Returns (x, smallest singular value of the scaled matrix, its condition number).
    Raises SingularMatrixError when the scaled matrix is numerically rank deficient.
    """
    n = len(b)
    diag = np.diag(A).copy()
    if np.any(diag <= 0):
        bad = np.flatnonzero(diag <= 0)
        raise SingularMatrixError(
            f"covariance has non-positive diagonal at entries {bad[:5].tolist()}: "
            f"those attribution words have zero variance", 0.0)
    s = 1.0 / np.sqrt(diag)
    As = A * s[:, None] * s[None, :]
    U, sv, Vt = np.linalg.svd(As)
    rcond = n * np.finfo(float).eps if rcond is None else rcond
    smin, smax = float(sv[-1]), float(sv[0])
    if smin <= rcond * smax:
        raise SingularMatrixError(
            f"covariance matrix is singular to working precision: smallest singular value "
            f"{smin:.3e} vs largest {smax:.3e} after diagonal scaling; pass ridge > 0 to regularise",
            smin)
    y = Vt.T @ ((U.T @ (s * b)) / sv)
    return s * y, smin, smax / smin


def solve(moments: SigMoments, delta: float, ridge: float = 0.0) -> SigStrategy:
    """Maximise expected PnL subject to PnL variance equal to ``delta``."""
    if not delta > 0:
        raise ConfigError(f"risk budget delta must be positive, got {delta}")
    if ridge < 0:
        raise ConfigError("ridge must be >= 0")
    mu, sigma = moments.mu, moments.sigma
    meta = dict(delta=float(delta), ridge=float(ridge), moments_id=moments.fingerprint())
    if not np.any(mu):
        return SigStrategy(moments.d, moments.N, moments.M, np.zeros(len(mu)), lam=0.0,
                           degenerate=True, **meta)
    A = sigma + ridge * np.eye(len(mu)) if ridge else sigma
    direction, _, _ = equilibrated_solve(A, mu)
    q = float(direction @ sigma @ direction)
    if not q > 0:
        raise SingularMatrixError(f"optimal direction has non-positive variance {q:.3e}", None)
    lam = math.sqrt(q) / (2.0 * math.sqrt(delta))
    return SigStrategy(moments.d, moments.N, moments.M, direction / (2.0 * lam), lam=lam, **meta)


def condition_number(moments: SigMoments, ridge: float = 0.0) -> float:
    A = moments.sigma + ridge * np.eye(moments.size)
    s = 1.0 / np.sqrt(np.clip(np.diag(A), 1e-300, None))
    sv = np.linalg.svd(A * s[:, None] * s[None, :], compute_uv=False)
    return float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf


def _flat(ell, moments: SigMoments) -> np.ndarray:
    v = ell.flat if isinstance(ell, SigStrategy) else np.asarray(ell, dtype=float).reshape(-1)
    if v.shape != moments.mu.shape:
        raise ShapeError(f"functional of length {v.size}; moments have {moments.size} entries")
    return v


def evaluate(ell, moments: SigMoments) -> tuple[float, float]:
    """(expected terminal PnL, PnL variance) of a flattened functional."""
    v = _flat(ell, moments)
    return float(v @ moments.mu), float(v @ moments.sigma @ v)


def frontier(moments: SigMoments, deltas, ridge: float = 0.0) -> list[FrontierPoint]:
    deltas = [float(x) for x in deltas]
    if not deltas or any(x <= 0 for x in deltas):
        raise ConfigError("delta grid must be non-empty and positive")
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ConfigError("delta grid must be strictly increasing")
    out = []
    for x in deltas:
        e, v = evaluate(solve(moments, x, ridge), moments)
        out.append(FrontierPoint(e, v, f"{x!r}"))
    return out


def perturb_cloud(strategy: SigStrategy, moments: SigMoments, count: int, magnitude: float,
                  seed: int = 0) -> list[FrontierPoint]:
    """Random perturbations of the optimum, each rescaled back to variance ``strategy.delta``."""
    if magnitude < 0:
        raise ConfigError("magnitude must be >= 0")
    base = _flat(strategy, moments)
    target = strategy.delta
    rng = np.random.Generator(np.random.PCG64(seed))
    scale = np.linalg.norm(base) / math.sqrt(base.size) if np.any(base) else 1.0
    out = []
    for i in range(count):
        v = base + magnitude * scale * rng.standard_normal(base.size)
        q = float(v @ moments.sigma @ v)
        if q <= 0:
            continue
        v = v * math.sqrt(target / q)
        e, var = evaluate(v, moments)
        out.append(FrontierPoint(e, var, f"perturbation-{i}"))
    return out


def markowitz_weights(mean: np.ndarray, cov: np.ndarray, delta: float) -> np.ndarray:
    """Static portfolio maximising w·mean subject to w·cov·w = delta."""
    x = np.linalg.solve(cov, mean)
    return x * math.sqrt(delta / float(mean @ x))


def markowitz_frontier(mean, cov, deltas) -> list[FrontierPoint]:
    pts = []
    for x in deltas:
        w = markowitz_weights(mean, cov, x)
        pts.append(FrontierPoint(float(w @ mean), float(w @ cov @ w), f"{float(x)!r}"))
    return pts
