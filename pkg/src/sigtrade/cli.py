"""Command line: ``sigtrade simulate|fit|backtest|frontier|learn-momentum --config FILE``.

Every subcommand writes into ``--out`` (default ``./out``), echoes the resolved
config as ``resolved_config.json`` and is a pure function of its config and
input files. Failures print a JSON error object on stderr and exit with 1.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import load_config, load_samples, require, resolve_path, with_seed
from .engine import aggregate_stats, backtest, learn_functional, signature_features
from .errors import ConfigError, ShapeError
from .market import MarketFactorPath, build_market_path, load_csv
from .moments import DEFAULT_COEFF_BUDGET, SigMoments, fit_moments
from .optimize import (SigStrategy, condition_number, evaluate, frontier, markowitz_frontier,
                       perturb_cloud, solve)
from .simulate import GENERATOR, SimConfig, momentum_positions, simulate_samples
from .words import WORD_ORDER_TAG


def _echo(out: Path, command: str, doc: dict):
    io.write_json(out / "resolved_config.json", {"command": command, "config": doc})


def cmd_simulate(doc, base, out: Path):
    model = require(doc, "model", str)
    sim = SimConfig.from_dict(doc.get("sim", {}))
    count = int(doc.get("count", 500))
    offset = int(doc.get("offset", 0))
    samples = simulate_samples(model, sim, count, offset)
    io.write_bundle(out, samples, {"model": model, "params": sim.to_dict(), "seed": sim.seed,
                                   "offset": offset, "generator": GENERATOR})
    return {"samples": count}


def cmd_fit(doc, base, out: Path):
    samples = load_samples(require(doc, "data"), base)
    M = int(require(doc, "M"))
    delta = float(require(doc, "delta"))
    ridge = float(doc.get("ridge", 0.0))
    mom = fit_moments(samples, M, doc.get("moments_mode", "restricted"),
                      int(doc.get("budget", DEFAULT_COEFF_BUDGET)))
    strat = solve(mom, delta, ridge)
    e, v = evaluate(strat, mom)
    report = {"M": M, "d": mom.d, "N": mom.N, "samples": len(samples), "delta": delta,
              "ridge": ridge, "expected_pnl": e, "variance": v,
              "variance_rel_error": abs(v - delta) / delta if not strat.degenerate else None,
              "lambda": strat.lam, "degenerate": strat.degenerate,
              "condition_number": condition_number(mom, ridge), "moments_id": mom.fingerprint()}
    io.write_json(out / "moments.json", mom.to_dict())
    io.write_json(out / "strategy.json", strat.to_dict())
    io.write_json(out / "fit_report.json", report)
    return report


def cmd_backtest(doc, base, out: Path):
    strat = SigStrategy.from_dict(io.read_json(resolve_path(base, require(doc, "strategy"))))
    samples = load_samples(require(doc, "data"), base)
    if (samples.d, samples.N) != (strat.d, strat.N):
        raise ShapeError(f"strategy is for d={strat.d}, N={strat.N}; data has d={samples.d}, N={samples.N}")
    ann = float(doc.get("annualization", math.sqrt(252.0)))
    results = [backtest(strat, p, ann) for p in samples]
    if doc.get("write_paths", True):
        header = (["t"] + [f"position{m}" for m in range(1, strat.d + 1)] + ["pnl", "cum_pnl"])
        for i, r in enumerate(results):
            rows = [[r.times[k], *r.positions[k], r.pnl[k], r.cum_pnl[k + 1]] for k in range(len(r.pnl))]
            io.write_csv(out / "paths" / f"path_{i:05d}.csv", header, rows)
    io.write_csv(out / "sharpe.csv", ["path", "sharpe", "terminal_pnl", "max_drawdown"],
                 [[i, r.stats["sharpe"], r.terminal_pnl, r.stats["max_drawdown"]]
                  for i, r in enumerate(results)])
    agg = aggregate_stats(results)
    io.write_json(out / "aggregate.json", agg)
    return agg


def cmd_frontier(doc, base, out: Path):
    mom = SigMoments.from_dict(io.read_json(resolve_path(base, require(doc, "moments"))))
    orders = [int(m) for m in doc.get("orders", range(mom.M + 1))]
    deltas = [float(x) for x in require(doc, "deltas", list)]
    ridge = float(doc.get("ridge", 0.0))
    rows = []
    for M in orders:
        for x, pt in zip(deltas, frontier(mom.truncate(M), deltas, ridge)):
            rows.append([M, x, pt.variance, pt.expected_pnl])
    io.write_csv(out / "frontier.csv", ["order", "delta", "variance", "expected_pnl"], rows)
    m0 = mom.truncate(0)
    mk = markowitz_frontier(m0.mu, m0.sigma, deltas)
    io.write_csv(out / "markowitz.csv", ["delta", "variance", "expected_pnl"],
                 [[x, p.variance, p.expected_pnl] for x, p in zip(deltas, mk)])
    summary = {"orders": orders, "deltas": deltas}
    cloud = doc.get("cloud")
    if cloud:
        M = int(cloud.get("order", max(orders)))
        x = float(cloud.get("delta", deltas[-1]))
        m = mom.truncate(M)
        best = solve(m, x, ridge)
        pts = perturb_cloud(best, m, int(cloud.get("count", 1000)),
                            float(cloud.get("magnitude", 0.5)), int(cloud.get("seed", 0)))
        io.write_csv(out / "cloud.csv", ["label", "variance", "expected_pnl"],
                     [[p.label, p.variance, p.expected_pnl] for p in pts])
        opt = evaluate(best, m)[0]
        summary["cloud"] = {"order": M, "delta": x, "optimum": opt,
                            "max_perturbed": max(p.expected_pnl for p in pts) if pts else None}
    io.write_json(out / "frontier_summary.json", summary)
    return summary


def _momentum_series(doc, base) -> MarketFactorPath:
    if "prices" in doc:
        spec = doc["prices"]
        t, X, _, _ = load_csv(resolve_path(base, require(spec, "csv")), require(spec, "schema", dict))
        if X.shape[1] != 1:
            raise ConfigError("learn-momentum needs exactly one price column")
        return build_market_path(t, X[:, :1], None, normalize_assets=spec.get("normalize_assets", True))
    sim = SimConfig.from_dict(doc.get("sim", {}))
    return simulate_samples("walk", sim, 1)[0]


def cmd_learn_momentum(doc, base, out: Path):
    path = _momentum_series(doc, base)
    fast, slow = int(doc.get("fast", 10)), int(doc.get("slow", 20))
    L = float(doc.get("L", 1.0))
    scale = doc.get("scale")
    target = momentum_positions(path.assets[:, 0], fast, slow, L,
                                None if scale is None else float(scale))[:-1]
    orders = [int(m) for m in doc.get("orders", [1, 2, 3])]
    reports = {M: learn_functional(target, path, M, float(doc.get("ridge", 0.0))) for M in orders}
    io.write_csv(out / "r2.csv", ["order", "r2", "residual_variance"],
                 [[M, r.r2, r.residual_variance] for M, r in reports.items()])
    result = {"fits": {str(M): r.to_dict() for M, r in reports.items()}}
    planted = doc.get("planted")
    if planted:
        Mp = int(planted.get("order", 2))
        rng = np.random.Generator(np.random.PCG64(int(planted.get("seed", 0))))
        feats = signature_features(path, Mp)
        ell0 = rng.standard_normal(feats.shape[1])
        rec = learn_functional(feats @ ell0, path, Mp)
        result["planted"] = {"order": Mp, "r2": rec.r2,
                             "max_coeff_error": float(np.max(np.abs(rec.coeffs - ell0)))}
    cmp_ = doc.get("compare")
    if cmp_:
        M = max(orders)
        n = path.n_increments
        sim = SimConfig.from_dict(dict(cmp_.get("sim", {}), n_steps=n))
        samples = simulate_samples("walk", sim, int(cmp_.get("paths", 300)))
        mom = fit_moments(samples, M)
        delta = float(cmp_.get("delta", 0.01))
        best = solve(mom, delta)
        ell = reports[M].coeffs
        ell = ell * math.sqrt(delta / float(ell @ mom.sigma @ ell))
        rows = [["optimal", *evaluate(best, mom)], ["learned_momentum", *evaluate(ell, mom)]]
        io.write_csv(out / "comparison.csv", ["strategy", "expected_pnl", "variance"], rows)
        result["comparison"] = {"order": M, "delta": delta,
                                "optimal_expected_pnl": rows[0][1], "learned_expected_pnl": rows[1][1]}
    io.write_json(out / "fit_reports.json", result)
    return {k: v for k, v in result.items() if k != "fits"} | {
        "r2": {str(M): r.r2 for M, r in reports.items()}}


COMMANDS = {
    "simulate": (cmd_simulate, ("sim.seed",)),
    "fit": (cmd_fit, ()),
    "backtest": (cmd_backtest, ()),
    "frontier": (cmd_frontier, ("cloud.seed",)),
    "learn-momentum": (cmd_learn_momentum, ("sim.seed",)),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sigtrade", description="Signature trading strategies")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML or JSON run config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fn, seed_keys = COMMANDS[args.command]
    try:
        doc, base = load_config(args.config)
        if args.seed is not None and args.command == "frontier" and "cloud" not in doc:
            seed_keys = ()
        doc = with_seed(doc, args.seed, *seed_keys)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _echo(out, args.command, doc)
        summary = fn(doc, base, out)
    except (ValueError, OSError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e),
                                     "command": args.command}, sort_keys=True) + "\n")
        return 1
    sys.stdout.write(io.dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
