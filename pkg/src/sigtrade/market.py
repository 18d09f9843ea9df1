"""Market factor paths Ẑ = (t, X, f): assembly, CSV ingestion and windowing."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, DegenerateChannelError, ShapeError
from .signature import SampledPath, _readonly

log = logging.getLogger(__name__)

FACTOR_MODES = ("raw", "zscore", "start_at_one")
SECONDS_PER_YEAR = 365.25 * 86400.0


@dataclass(frozen=True)
class MarketFactorPath:
    """Sampled market factor path: times (n+1,), assets X (n+1, d), factors f (n+1, N)."""

    times: np.ndarray
    assets: np.ndarray
    factors: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        X = np.asarray(self.assets, dtype=float)
        X = X[:, None] if X.ndim == 1 else X
        f = np.asarray(self.factors, dtype=float) if self.factors is not None else np.zeros((len(t), 0))
        f = f[:, None] if f.ndim == 1 else f
        if f.size == 0:
            f = np.zeros((len(t), 0))
        if not (len(t) == len(X) == len(f)):
            raise ShapeError(f"row counts differ: times {len(t)}, assets {len(X)}, factors {len(f)}")
        if X.shape[1] < 1:
            raise ShapeError("need at least one asset")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise DataError("times must be strictly increasing")
        if not (np.isfinite(t).all() and np.isfinite(X).all() and np.isfinite(f).all()):
            raise DataError("market path contains NaN or inf")
        object.__setattr__(self, "times", _readonly(t))
        object.__setattr__(self, "assets", _readonly(X))
        object.__setattr__(self, "factors", _readonly(f))

    @property
    def d(self) -> int:
        return self.assets.shape[1]

    @property
    def N(self) -> int:
        return self.factors.shape[1]

    @property
    def n_increments(self) -> int:
        return len(self.times) - 1

    def channels(self) -> np.ndarray:
        """Node values of the time-augmented path, columns (t, X_1..X_d, f_1..f_N)."""
        return np.column_stack([self.times, self.assets, self.factors])

    def sampled_path(self) -> SampledPath:
        return SampledPath(self.times, self.channels())

    def window(self, start: int, stop: int) -> "MarketFactorPath":
        return MarketFactorPath(self.times[start:stop], self.assets[start:stop],
                                self.factors[start:stop])


def _transform_factors(f: np.ndarray, mode: str) -> np.ndarray:
    if mode not in FACTOR_MODES:
        raise ValueError(f"factor_mode must be one of {FACTOR_MODES}, got {mode!r}")
    if mode == "raw" or f.shape[1] == 0:
        return f
    if mode == "start_at_one":
        return f - f[:1] + 1.0
    sd = f.std(axis=0)
    bad = np.flatnonzero(sd == 0)
    if len(bad):
        raise DegenerateChannelError(
            f"factor channel(s) {bad.tolist()} have zero variance; z-scoring would give an all-zero channel")
    return (f - f.mean(axis=0)) / sd


def build_market_path(times, X, f=None, normalize_assets: bool = True,
                      factor_mode: str = "raw") -> MarketFactorPath:
    """Assemble Ẑ = (t, X, f), rebase time to 0 and optionally divide assets by X_0."""
    t = np.asarray(times, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    X = X[:, None] if X.ndim == 1 else X
    if f is None:
        f = np.zeros((len(t), 0))
    f = np.asarray(f, dtype=float)
    f = f[:, None] if f.ndim == 1 else f.reshape(len(f), -1)
    if not (np.isfinite(X).all() and np.isfinite(f).all() and np.isfinite(t).all()):
        raise DataError("inputs contain NaN or inf")
    if normalize_assets:
        if np.any(X <= 0):
            raise DataError("asset prices must be strictly positive to normalise by X_0")
        X = X / X[:1]
    f = _transform_factors(f, factor_mode)
    t = t - t[0] if len(t) else t
    return MarketFactorPath(t, X, f)


@dataclass
class CsvSchema:
    time_column: str
    asset_columns: list[str]
    factor_columns: list[str] = field(default_factory=list)
    delimiter: str = ","
    time_format: str = "auto"  # auto | iso | epoch | numeric
    time_unit_seconds: float = SECONDS_PER_YEAR
    max_bad_fraction: float = 0.05

    @classmethod
    def from_dict(cls, d: dict) -> "CsvSchema":
        return cls(**d)


@dataclass
class LoadReport:
    rows_read: int
    rows_dropped_missing: int
    rows_unparseable: int


_MISSING = {"", "na", "nan", "null", "none"}


def _parse_time(s: str, fmt: str, unit: float) -> float:
    s = s.strip()
    if fmt in ("numeric",):
        return float(s)
    if fmt in ("epoch",):
        return float(s) / unit
    if fmt == "auto":
        try:
            return float(s) / unit
        except ValueError:
            pass
    dt = datetime.fromisoformat(s.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp() / unit


def load_csv(path, schema: CsvSchema | dict):
    """Read (times, X, f) from a headered UTF-8 CSV; returns them plus a LoadReport.

    Rows with any missing field are dropped. Rows that fail to parse count
    against ``max_bad_fraction``. Output is sorted by time; duplicate
    timestamps are an error.
    """
    if isinstance(schema, dict):
        schema = CsvSchema.from_dict(schema)
    cols = [schema.time_column, *schema.asset_columns, *schema.factor_columns]
    rows, n_read, n_missing, n_bad = [], 0, 0, 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh, delimiter=schema.delimiter)
        absent = [c for c in cols if c not in (reader.fieldnames or [])]
        if absent:
            raise DataError(f"columns {absent} not in CSV header {reader.fieldnames}")
        for rec in reader:
            n_read += 1
            raw = [rec.get(c) for c in cols]
            if any(v is None or v.strip().lower() in _MISSING for v in raw):
                n_missing += 1
                continue
            try:
                t = _parse_time(raw[0], schema.time_format, schema.time_unit_seconds)
                vals = [float(v) for v in raw[1:]]
            except ValueError:
                n_bad += 1
                continue
            if not all(math.isfinite(v) for v in vals):
                n_bad += 1
                continue
            rows.append((t, vals))
    if n_read and n_bad / n_read > schema.max_bad_fraction:
        raise DataError(f"{n_bad} of {n_read} rows unparseable (limit {schema.max_bad_fraction:.0%})")
    if not rows:
        raise DataError(f"no usable rows in {path}")
    rows.sort(key=lambda r: r[0])
    t = np.array([r[0] for r in rows])
    if np.any(np.diff(t) == 0):
        dup = t[1:][np.diff(t) == 0][0]
        raise DataError(f"duplicate timestamp {dup!r} in {path}")
    vals = np.array([r[1] for r in rows])
    d = len(schema.asset_columns)
    report = LoadReport(n_read, n_missing, n_bad)
    if n_missing or n_bad:
        log.info("%s: dropped %d rows with missing fields, %d unparseable", path, n_missing, n_bad)
    return t, vals[:, :d], vals[:, d:], report


@dataclass(frozen=True)
class SampleSet:
    paths: tuple[MarketFactorPath, ...]

    def __post_init__(self):
        paths = tuple(self.paths)
        if not paths:
            raise DataError("sample set is empty")
        d, N, n = paths[0].d, paths[0].N, paths[0].n_increments
        for p in paths:
            if (p.d, p.N, p.n_increments) != (d, N, n):
                raise ShapeError(
                    f"inhomogeneous samples: ({p.d}, {p.N}, {p.n_increments}) vs ({d}, {N}, {n})")
        object.__setattr__(self, "paths", paths)

    @property
    def d(self):
        return self.paths[0].d

    @property
    def N(self):
        return self.paths[0].N

    @property
    def horizon(self):
        return self.paths[0].n_increments

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, i):
        return self.paths[i]


def rebase(path: MarketFactorPath, mode: str = "multiplicative") -> MarketFactorPath:
    """Shift time to 0 and assets to 1, multiplicatively (prices) or additively."""
    X = path.assets
    if mode == "multiplicative":
        if np.any(X <= 0):
            raise DataError("multiplicative rebase needs positive prices")
        X = X / X[:1]
    elif mode == "additive":
        X = X - X[:1] + 1.0
    else:
        raise ValueError(f"unknown rebase mode {mode!r}")
    return MarketFactorPath(path.times - path.times[0], X, path.factors)


def window_samples(path: MarketFactorPath, horizon: int, stride: int,
                   rebase_mode: str = "multiplicative") -> SampleSet:
    """Cut ``horizon``-increment windows every ``stride`` nodes, each rebased to (0, 1, ·)."""
    if horizon < 1 or stride < 1:
        raise ValueError("horizon and stride must be >= 1")
    n_nodes = len(path.times)
    if n_nodes < horizon + 1:
        raise DataError(f"path has {n_nodes - 1} increments, shorter than horizon {horizon}")
    starts = range(0, n_nodes - horizon, stride)
    return SampleSet(tuple(rebase(path.window(s, s + horizon + 1), rebase_mode) for s in starts))
