"""Truncated signatures of piecewise-linear paths, time augmentation and lead-lag.

Dense signatures are stored as one flat array in graded-lex word order: the
level-k block of a C-channel path holds C**k entries and is a C-ary
flattening of the order-k tensor. ``WordTable`` covers the sparse case where
only a prefix-closed subset of words is needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import MissingWordError, OrderError, ShapeError, DataError
from .words import Word, count_words, enumerate_words, level_offset, sort_words, word_index


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SampledPath:
    """Nodes of a piecewise-linear path: strictly increasing times, (n+1, C) values."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or len(t) != len(v):
            raise ShapeError(f"times ({len(t)}) and values ({v.shape}) disagree")
        if len(t) < 1:
            raise DataError("a path needs at least one node")
        if np.any(np.diff(t) <= 0):
            raise DataError("times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DataError("path contains non-finite values")
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "values", _readonly(v))

    @property
    def channels(self) -> int:
        return self.values.shape[1]

    @property
    def n_increments(self) -> int:
        return len(self.times) - 1

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)


@dataclass(frozen=True)
class LeadLagPath(SampledPath):
    """Lead-lag path: letters 0..C-1 are the lag copy, C..2C-1 the lead copy."""

    @property
    def source_channels(self) -> int:
        return self.channels // 2


def _path_values(path) -> np.ndarray:
    if isinstance(path, SampledPath):
        return path.values
    v = np.asarray(path, dtype=float)
    return v[:, None] if v.ndim == 1 else v


@dataclass(frozen=True)
class TruncatedSignature:
    channels: int
    order: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = _readonly(np.asarray(self.coeffs, dtype=float).reshape(-1))
        if len(c) != count_words(self.channels, self.order):
            raise ShapeError(
                f"{len(c)} coefficients for {self.channels} channels at order {self.order}")
        object.__setattr__(self, "coeffs", c)

    def level(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.order:
            raise OrderError(f"level {k} not in 0..{self.order}")
        start = level_offset(self.channels, k)
        block = self.coeffs[start:start + self.channels ** k]
        return block.reshape((self.channels,) * k) if k else block.reshape(())

    def level_flat(self, k: int) -> np.ndarray:
        start = level_offset(self.channels, k)
        return self.coeffs[start:start + self.channels ** k]

    def coeff(self, w: Word) -> float:
        if len(w) > self.order:
            raise OrderError(f"word of length {len(w)} exceeds signature order {self.order}")
        if any(not 0 <= a < self.channels for a in w):
            raise MissingWordError(f"word {w} uses letters outside {self.channels} channels")
        return float(self.coeffs[word_index(tuple(w), self.channels)])

    __getitem__ = coeff

    def words(self) -> list[Word]:
        return enumerate_words(self.channels, self.order)


def unit_signature(channels: int, order: int) -> TruncatedSignature:
    c = np.zeros(count_words(channels, order))
    c[0] = 1.0
    return TruncatedSignature(channels, order, c)


def sig_segment(delta, order: int) -> TruncatedSignature:
    """Signature of a straight line with increment ``delta``: level k is δ^{⊗k}/k!."""
    if order < 0:
        raise ValueError("order must be >= 0")
    delta = np.asarray(delta, dtype=float).reshape(-1)
    levels = [np.ones(1)]
    cur = np.ones(1)
    for k in range(1, order + 1):
        cur = np.multiply.outer(cur, delta).ravel() / k
        levels.append(cur)
    return TruncatedSignature(len(delta), order, np.concatenate(levels))


def chen_concat(s1: TruncatedSignature, s2: TruncatedSignature) -> TruncatedSignature:
    """Truncated tensor product: signature of the concatenated path."""
    if s1.channels != s2.channels or s1.order != s2.order:
        raise ShapeError(
            f"cannot concatenate signatures ({s1.channels}, {s1.order}) and ({s2.channels}, {s2.order})")
    a = [s1.level_flat(k) for k in range(s1.order + 1)]
    b = [s2.level_flat(k) for k in range(s2.order + 1)]
    out = []
    for k in range(s1.order + 1):
        acc = np.zeros(s1.channels ** k)
        for i in range(k + 1):
            acc += np.multiply.outer(a[i], b[k - i]).ravel()
        out.append(acc)
    return TruncatedSignature(s1.channels, s1.order, np.concatenate(out))


def signature_of_path(path, order: int) -> TruncatedSignature:
    values = _path_values(path)
    sig = unit_signature(values.shape[1], order)
    for delta in np.diff(values, axis=0):
        sig = chen_concat(sig, sig_segment(delta, order))
    return sig


def prefix_signatures(path, order: int) -> list[TruncatedSignature]:
    """Signatures of the sub-paths over nodes 0..k, one per node."""
    values = _path_values(path)
    sig = unit_signature(values.shape[1], order)
    out = [sig]
    for delta in np.diff(values, axis=0):
        sig = chen_concat(sig, sig_segment(delta, order))
        out.append(sig)
    return out


def time_augment(times, values) -> SampledPath:
    """Prepend time as channel 0."""
    t = np.asarray(times, dtype=float).reshape(-1)
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if len(t) != len(v):
        raise ShapeError(f"{len(t)} times for {len(v)} value rows")
    return SampledPath(t, np.column_stack([t, v]))


def lead_lag_values(values: np.ndarray) -> np.ndarray:
    """Node sequence of the lead-lag path as a (2n+1, 2C) array, lag block first.

    z_0 = (P_0, P_0); z_{2k+1} = (P_k, P_{k+1}); z_{2k+2} = (P_{k+1}, P_{k+1}).
    """
    values = np.asarray(values, dtype=float)
    n = len(values) - 1
    lead = np.concatenate([values[:1], np.repeat(values[1:], 2, axis=0)])
    lag = np.concatenate([np.repeat(values[:-1], 2, axis=0), values[-1:]])
    assert len(lag) == len(lead) == 2 * n + 1
    return np.column_stack([lag, lead])


def lead_lag(path: SampledPath) -> LeadLagPath:
    """Lead-lag transform of a sampled path (lead advances first, then lag catches up)."""
    values = _path_values(path)
    if len(values) < 2:
        raise DataError("lead-lag needs at least 2 nodes")
    z = lead_lag_values(values)
    return LeadLagPath(np.arange(len(z), dtype=float), z)


def lead_lag_increments(values: np.ndarray) -> np.ndarray:
    """Increments of the lead-lag path without materialising the node array."""
    d = np.diff(np.asarray(values, dtype=float), axis=0)
    n, C = d.shape
    out = np.zeros((2 * n, 2 * C))
    out[0::2, C:] = d
    out[1::2, :C] = d
    return out


class WordTable:
    """Prefix-closed word set in graded-lex order, packed for the compiled kernels."""

    def __init__(self, channels: int, words: Iterable[Word]):
        ws = set(tuple(w) for w in words)
        closed = set()
        for w in ws:
            for j in range(len(w) + 1):
                closed.add(w[:j])
        self.channels = channels
        self.words: list[Word] = sort_words(closed)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.order = max(len(w) for w in self.words)
        W, K = len(self.words), max(self.order, 1)
        letters = np.zeros((W, K), dtype=np.int64)
        anc = np.zeros((W, K), dtype=np.int64)
        depth = np.zeros(W, dtype=np.int64)
        for i, w in enumerate(self.words):
            if any(not 0 <= a < channels for a in w):
                raise ShapeError(f"word {w} has letters outside {channels} channels")
            depth[i] = len(w)
            for j, a in enumerate(w):
                letters[i, j] = a
                anc[i, j] = self.index[w[:j]]
        self.letters, self.anc, self.depth = letters, anc, depth
        self.inv_fact = np.array([1.0 / math.factorial(k) for k in range(self.order + 1)])

    @classmethod
    def dense(cls, channels: int, order: int) -> "WordTable":
        return cls(channels, enumerate_words(channels, order))

    def __len__(self):
        return len(self.words)

    def fold(self, increments: np.ndarray, record: bool = False) -> np.ndarray:
        inc = np.ascontiguousarray(increments, dtype=float).reshape(-1, self.channels)
        out = _kernels.fold_path(inc, self.letters, self.depth, self.anc, self.inv_fact, record)
        return out if record else out[0]

    def fold_many(self, increment_list: Sequence[np.ndarray]) -> np.ndarray:
        inc, off = self._stack(increment_list)
        return _kernels.fold_many(inc, off, self.letters, self.depth, self.anc, self.inv_fact)

    def sum_many(self, increment_list: Sequence[np.ndarray]) -> np.ndarray:
        inc, off = self._stack(increment_list)
        return _kernels.sum_many(inc, off, self.letters, self.depth, self.anc, self.inv_fact)

    def _stack(self, increment_list):
        arrs = [np.asarray(a, dtype=float).reshape(-1, self.channels) for a in increment_list]
        off = np.zeros(len(arrs) + 1, dtype=np.int64)
        off[1:] = np.cumsum([len(a) for a in arrs])
        inc = np.ascontiguousarray(np.concatenate(arrs) if arrs else np.zeros((0, self.channels)))
        return inc, off


@dataclass(frozen=True)
class WordSignature:
    """Signature coefficients restricted to a word table (paired like a dense one)."""

    table: WordTable
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _readonly(self.coeffs))

    @property
    def channels(self):
        return self.table.channels

    @property
    def order(self):
        return self.table.order

    def coeff(self, w: Word) -> float:
        w = tuple(w)
        if len(w) > self.order:
            raise OrderError(f"word of length {len(w)} exceeds signature order {self.order}")
        try:
            return float(self.coeffs[self.table.index[w]])
        except KeyError:
            raise MissingWordError(f"word {w} is not stored in this signature") from None

    __getitem__ = coeff


def prefix_signature_matrix(path, order: int, table: WordTable | None = None) -> np.ndarray:
    """Rows are the order-``order`` signatures of the prefixes over nodes 0..k.

    Equal to ``prefix_signatures`` stacked, but computed by the compiled kernel.
    """
    values = _path_values(path)
    table = table or WordTable.dense(values.shape[1], order)
    return table.fold(np.diff(values, axis=0), record=True)


def segment_norms(path) -> float:
    """1-variation of the piecewise-linear path (sum of Euclidean segment lengths)."""
    return float(np.linalg.norm(np.diff(_path_values(path), axis=0), axis=1).sum())
