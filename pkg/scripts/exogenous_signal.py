"""Exogenous-signal experiment: Sharpe with and without the factor channel."""
from dataclasses import replace

from _common import parse, save
from sigtrade.experiments import SignalExperiment, run_signal

args = parse(__doc__)
cfg = SignalExperiment()
if args.seed is not None:
    cfg = replace(cfg, sim=replace(cfg.sim, seed=args.seed))
r = run_signal(cfg)
for M in r["sharpe_mean"]:
    print(f"order {M}: with signal {r['sharpe_mean'][M]:.3f}, endogenous {r['endogenous_sharpe_mean'][M]:.3f}")
save(args, "exogenous_signal", r)
