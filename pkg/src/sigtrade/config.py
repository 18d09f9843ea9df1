"""Run configuration: YAML (or JSON) documents, flag overrides and data sources."""
from __future__ import annotations

import copy
from pathlib import Path

import yaml

from .errors import ConfigError
from .market import SampleSet, build_market_path, load_csv, window_samples
from .io import read_bundle


def load_config(path) -> tuple[dict, Path]:
    """Parse a config file; returns (document, base for relative paths).

    Relative paths inside a config resolve against the working directory,
    the same as ``--out``.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc, Path(".")


def resolve_path(base: Path, value) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def require(doc: dict, key: str, kind=None):
    if key not in doc:
        raise ConfigError(f"missing required config key {key!r}")
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise ConfigError(f"config key {key!r} must be {kind.__name__}, got {type(v).__name__}")
    return v


def with_seed(doc: dict, seed, *keys) -> dict:
    """Copy of ``doc`` with each dotted key path set to ``seed`` (when given)."""
    doc = copy.deepcopy(doc)
    if seed is None:
        return doc
    for k in keys:
        parts = k.split(".")
        node = doc
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = int(seed)
    return doc


def load_samples(spec: dict, base: Path) -> SampleSet:
    """A sample set from either a simulated bundle directory or a windowed CSV.

    ``{bundle: dir}`` or ``{csv: file, schema: {...}, horizon: h, stride: s,
    rebase: multiplicative|additive, normalize_assets: bool, factor_mode: raw|zscore|start_at_one}``.
    """
    if not isinstance(spec, dict):
        raise ConfigError("data must be a mapping with a 'bundle' or 'csv' entry")
    if "bundle" in spec:
        d = resolve_path(base, spec["bundle"])
        if not (d / "manifest.json").is_file():
            raise ConfigError(f"no manifest.json in sample bundle {d}")
        return read_bundle(d)
    if "csv" in spec:
        f = resolve_path(base, spec["csv"])
        if not f.is_file():
            raise ConfigError(f"data file not found: {f}")
        t, X, fac, _ = load_csv(f, require(spec, "schema", dict))
        path = build_market_path(t, X, fac, normalize_assets=spec.get("normalize_assets", True),
                                 factor_mode=spec.get("factor_mode", "raw"))
        return window_samples(path, int(require(spec, "horizon")), int(spec.get("stride", spec["horizon"])),
                              spec.get("rebase", "multiplicative"))
    raise ConfigError("data must name a 'bundle' directory or a 'csv' file")
