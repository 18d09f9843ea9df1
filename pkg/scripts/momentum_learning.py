"""Learn the MACD momentum strategy as a signature functional and compare with the optimum."""
from dataclasses import replace

from _common import parse, save
from sigtrade.experiments import MomentumExperiment, run_momentum

args = parse(__doc__)
cfg = MomentumExperiment()
if args.seed is not None:
    cfg = replace(cfg, sim=replace(cfg.sim, seed=args.seed))
r = run_momentum(cfg)
for M, v in r["r2"].items():
    print(f"order {M}: R2 {v:.4f}")
print(f"planted functional R2 {r['planted_r2']:.12f}")
print(f"E[PnL] at equal variance: optimal {r['optimal_expected_pnl']:.4f}, "
      f"learned momentum {r['learned_expected_pnl']:.4f}")
save(args, "momentum_learning", r)
