"""Expected lead-lag signatures and the PnL attribution moments (mean vector, covariance matrix).

Letter layout of the lead-lag alphabet for a market with d assets and N
factors (C = N + d + 1 source channels):

    0 .. C-1    lag copies of (t, X_1..X_d, f_1..f_N)
    C .. 2C-1   lead copies, same order

A strategy word w over the source alphabet is read verbatim as a lag word.
Appending the lead letter of asset m turns "position functional" w into the
PnL contribution of that position traded in asset m.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DataError, OrderError, ShapeError, MissingWordError
from .market import MarketFactorPath, SampleSet
from .signature import WordTable, lead_lag_increments
from .words import (WORD_ORDER_TAG, Word, count_words, enumerate_words, shuffle_items,
                    word_index, word_str)

log = logging.getLogger(__name__)

# dense coefficient budget (float64 entries); 2**24 is 128 MiB per array
DEFAULT_COEFF_BUDGET = 2 ** 24


def source_channels(d: int, N: int) -> int:
    return N + d + 1


def shift_letter(m: int, d: int, N: int) -> int:
    """Lead-block letter of asset m (1-based) in the lead-lag alphabet."""
    if not 1 <= m <= d:
        raise ValueError(f"asset index {m} outside 1..{d}")
    return N + d + 1 + m


def attribution_words(d: int, N: int, M: int) -> list[Word]:
    """The words w f(m), asset-major then canonical order of w."""
    W = enumerate_words(source_channels(d, N), M)
    return [w + (shift_letter(m, d, N),) for m in range(1, d + 1) for w in W]


def required_words(d: int, N: int, M: int) -> list[Word]:
    """Every lead-lag word whose expectation the moments need, in canonical order.

    That is each attribution word and every word in the shuffle of two of
    them. Far smaller than the full order-(2M+2) word set because each
    shuffled word contains exactly two lead letters from the asset block.
    """
    att = attribution_words(d, N, M)
    out = set(att)
    for i, a in enumerate(att):
        for b in att[i:]:
            out.update(u for u, _ in shuffle_items(a, b))
    return sorted(out, key=lambda w: (len(w), w))


def check_budget(count: int, budget: int, what: str):
    if count > budget:
        raise CapacityError(f"{what} needs {count} coefficients, over the budget of {budget}")


@dataclass(frozen=True)
class ExpectedSignature:
    """Mean lead-lag signature over a sample set.

    ``words`` is None for dense storage (every word up to ``order`` in canonical
    order); otherwise it lists the stored words, prefix-closed and sorted.
    """

    channels: int
    order: int
    coeffs: np.ndarray
    sample_count: int
    words: tuple[Word, ...] | None = None
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.words is None:
            if len(c) != count_words(self.channels, self.order):
                raise ShapeError(f"{len(c)} coefficients for dense order {self.order}")
        else:
            ws = tuple(tuple(w) for w in self.words)
            if len(ws) != len(c):
                raise ShapeError(f"{len(c)} coefficients for {len(ws)} words")
            object.__setattr__(self, "words", ws)
            object.__setattr__(self, "_index", {w: i for i, w in enumerate(ws)})

    @property
    def dense(self) -> bool:
        return self.words is None

    def coeff(self, w: Word) -> float:
        w = tuple(w)
        if len(w) > self.order:
            raise OrderError(f"word {word_str(w)} has length {len(w)} > expected-signature order {self.order}")
        if self.words is None:
            if any(not 0 <= a < self.channels for a in w):
                raise MissingWordError(f"word {w} outside {self.channels} channels")
            return float(self.coeffs[word_index(w, self.channels)])
        try:
            return float(self.coeffs[self._index[w]])
        except KeyError:
            raise MissingWordError(f"word {word_str(w)} is not stored in this expected signature") from None

    __getitem__ = coeff

    def to_dict(self) -> dict:
        return {
            "kind": "expected_signature",
            "channels": self.channels,
            "order": self.order,
            "word_order": WORD_ORDER_TAG,
            "sample_count": self.sample_count,
            "words": None if self.words is None else [list(w) for w in self.words],
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExpectedSignature":
        if d.get("word_order") != WORD_ORDER_TAG:
            raise ShapeError(f"unsupported word order {d.get('word_order')!r}")
        words = d.get("words")
        return cls(int(d["channels"]), int(d["order"]), np.array(d["coeffs"], dtype=float),
                   int(d["sample_count"]), None if words is None else tuple(tuple(w) for w in words))


def _as_paths(samples) -> list[MarketFactorPath]:
    if isinstance(samples, MarketFactorPath):
        return [samples]
    paths = list(samples.paths if isinstance(samples, SampleSet) else samples)
    if not paths:
        raise DataError("sample set is empty")
    return paths


def lead_lag_increments_of(path: MarketFactorPath) -> np.ndarray:
    return lead_lag_increments(path.channels())


def expected_signature(samples, order: int, words: Iterable[Word] | None = None,
                       budget: int = DEFAULT_COEFF_BUDGET) -> ExpectedSignature:
    """Mean over samples of the lead-lag signature of each time-augmented sample.

    With ``words`` given, only those words (and their prefixes) are computed;
    the values are identical to the dense computation on the same words.
    Summation runs in sample order.
    """
    if order < 1:
        raise ValueError("expected signature order must be >= 1")
    paths = _as_paths(samples)
    C = 2 * paths[0].channels().shape[1]
    if words is None:
        check_budget(count_words(C, order), budget, f"a dense order-{order} signature over {C} letters")
        table = WordTable.dense(C, order)
    else:
        ws = [tuple(w) for w in words]
        if any(len(w) > order for w in ws):
            raise OrderError(f"requested words exceed order {order}")
        check_budget(len(ws), budget, "the requested word set")
        table = WordTable(C, ws + [()])
    incs = [lead_lag_increments_of(p) for p in paths]
    if any(i.shape[1] != C for i in incs):
        raise ShapeError("samples have differing channel counts")
    mean = table.sum_many(incs) / len(paths)
    return ExpectedSignature(C, order, mean, len(paths),
                             None if words is None else tuple(table.words))


def _check_order(E: ExpectedSignature, need: int, what: str, M: int):
    if E.order < need:
        raise OrderError(
            f"{what} at strategy order M={M} requires an expected signature of order "
            f"{need} (2M+2 for the covariance, M+1 for the mean); got order {E.order}")


def _check_dims(E: ExpectedSignature, d: int, N: int):
    if E.channels != 2 * source_channels(d, N):
        raise ShapeError(
            f"expected signature has {E.channels} letters; d={d}, N={N} needs {2 * source_channels(d, N)}")


def build_mu_sig(E: ExpectedSignature, d: int, N: int, M: int) -> np.ndarray:
    _check_dims(E, d, N)
    _check_order(E, M + 1, "the attribution vector", M)
    return np.array([E.coeff(w) for w in attribution_words(d, N, M)])


def build_sigma_sig(E: ExpectedSignature, d: int, N: int, M: int) -> np.ndarray:
    _check_dims(E, d, N)
    _check_order(E, 2 * M + 2, "the covariance matrix", M)
    att = attribution_words(d, N, M)
    mu = np.array([E.coeff(w) for w in att])
    n = len(att)
    S = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            second = 0.0
            for u, k in shuffle_items(att[i], att[j]):
                second += k * E.coeff(u)
            S[i, j] = S[j, i] = second - mu[i] * mu[j]
    return S


@dataclass(frozen=True)
class SigMoments:
    """Attribution mean vector and covariance, flattened asset-major then by word."""

    d: int
    N: int
    M: int
    mu: np.ndarray
    sigma: np.ndarray
    sample_count: int = 0

    def __post_init__(self):
        n = self.d * count_words(source_channels(self.d, self.N), self.M)
        mu = np.array(self.mu, dtype=float).reshape(-1)
        sigma = np.array(self.sigma, dtype=float)
        if mu.shape != (n,) or sigma.shape != (n, n):
            raise ShapeError(f"moments of size {mu.shape}/{sigma.shape}, expected {n}")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def words(self) -> list[Word]:
        return enumerate_words(source_channels(self.d, self.N), self.M)

    @property
    def size(self) -> int:
        return len(self.mu)

    def truncate(self, M: int) -> "SigMoments":
        """Moments at a lower strategy order (the lower-order words are a prefix per asset)."""
        if not 0 <= M <= self.M:
            raise OrderError(f"cannot truncate order-{self.M} moments to order {M}")
        per = count_words(source_channels(self.d, self.N), self.M)
        keep = count_words(source_channels(self.d, self.N), M)
        idx = np.concatenate([np.arange(m * per, m * per + keep) for m in range(self.d)])
        return SigMoments(self.d, self.N, M, self.mu[idx], self.sigma[np.ix_(idx, idx)], self.sample_count)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.d},{self.N},{self.M},{self.sample_count}".encode())
        h.update(self.mu.tobytes())
        h.update(self.sigma.tobytes())
        return h.hexdigest()[:16]

    def to_dict(self) -> dict:
        return {
            "kind": "sig_moments",
            "d": self.d, "N": self.N, "M": self.M,
            "word_order": WORD_ORDER_TAG,
            "sample_count": self.sample_count,
            "words": [list(w) for w in self.words],
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "id": self.fingerprint(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SigMoments":
        if d.get("word_order") != WORD_ORDER_TAG:
            raise ShapeError(f"unsupported word order {d.get('word_order')!r}")
        return cls(int(d["d"]), int(d["N"]), int(d["M"]), np.array(d["mu"]),
                   np.array(d["sigma"]), int(d.get("sample_count", 0)))


def moments_from_expected(E: ExpectedSignature, d: int, N: int, M: int) -> SigMoments:
    return SigMoments(d, N, M, build_mu_sig(E, d, N, M), build_sigma_sig(E, d, N, M), E.sample_count)


def fit_moments(samples, M: int, mode: str = "restricted",
                budget: int = DEFAULT_COEFF_BUDGET) -> SigMoments:
    """Expected signature at order 2M+2 followed by moment assembly.

    ``mode="restricted"`` computes only the words the moments read;
    ``mode="dense"`` computes the full truncated signature.
    """
    paths = _as_paths(samples)
    d, N = paths[0].d, paths[0].N
    Q = 2 * M + 2
    if mode == "dense":
        check_budget(count_words(2 * source_channels(d, N), Q), budget,
                     f"a dense order-{Q} signature over {2 * source_channels(d, N)} letters")
        E = expected_signature(paths, Q, budget=budget)
    elif mode == "restricted":
        E = expected_signature(paths, Q, words=required_words(d, N, M), budget=budget)
    else:
        raise ValueError(f"unknown moments mode {mode!r}")
    return moments_from_expected(E, d, N, M)
