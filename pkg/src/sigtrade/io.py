"""Deterministic JSON and CSV artifacts.

Floats are written with ``repr`` (shortest round-trip form) and JSON keys are
sorted, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DataError
from .market import MarketFactorPath, SampleSet


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, default=_default, allow_nan=False) + "\n"


def write_json(path, obj):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


def market_header(d: int, N: int) -> list[str]:
    return ["t"] + [f"x{m}" for m in range(1, d + 1)] + [f"f{j}" for j in range(1, N + 1)]


def write_market_csv(path, p: MarketFactorPath):
    write_csv(path, market_header(p.d, p.N), p.channels().tolist())


def read_market_csv(path, d: int, N: int) -> MarketFactorPath:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != market_header(d, N):
        raise DataError(f"{path}: header {rows[0] if rows else None} does not match d={d}, N={N}")
    a = np.array([[float(x) for x in r] for r in rows[1:]])
    return MarketFactorPath(a[:, 0], a[:, 1:1 + d], a[:, 1 + d:])


def write_bundle(out_dir, samples: SampleSet, manifest: dict) -> dict:
    out_dir = Path(out_dir)
    names = []
    for i, p in enumerate(samples):
        name = f"sample_{i:05d}.csv"
        write_market_csv(out_dir / name, p)
        names.append(name)
    man = dict(manifest, d=samples.d, N=samples.N, horizon=samples.horizon,
               count=len(samples), files=names)
    write_json(out_dir / "manifest.json", man)
    return man


def read_bundle(bundle_dir) -> SampleSet:
    bundle_dir = Path(bundle_dir)
    man = read_json(bundle_dir / "manifest.json")
    d, N = int(man["d"]), int(man["N"])
    return SampleSet(tuple(read_market_csv(bundle_dir / f, d, N) for f in man["files"]))
