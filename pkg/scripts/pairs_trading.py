"""Pairs-trading experiment: held-out Sharpe by order and in-sample frontiers."""
from dataclasses import replace

from _common import parse, save
from sigtrade.experiments import PairsExperiment, run_pairs

args = parse(__doc__)
cfg = PairsExperiment()
if args.seed is not None:
    cfg = replace(cfg, sim=replace(cfg.sim, seed=args.seed))
r = run_pairs(cfg)
for M, s in r["sharpe_mean"].items():
    print(f"order {M}: mean held-out Sharpe {s:.3f}")
for M, row in r["frontier_expected_pnl"].items():
    print(f"order {M}: in-sample E[PnL] on delta grid " + " ".join(f"{x:.4f}" for x in row))
save(args, "pairs_trading", r)
