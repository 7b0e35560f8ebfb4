#!/usr/bin/env python3
"""Convergence study for both cases: fused test error vs number of sweeps.

    python scripts/run_convergence.py --trials 200 --out results/full

Defaults are desk scale (S=20); pass --trials 200 for the full study.
"""
import argparse
from pathlib import Path

from sntrain.cli import write_svg
from sntrain.experiments import ExperimentConfig, run_convergence_study

p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
p.add_argument("--trials", type=int, default=20)
p.add_argument("--T", type=int, default=100)
p.add_argument("--r", type=float, default=0.5)
p.add_argument("--seed", type=int, default=20070101)
p.add_argument("--workers", type=int, default=1)
p.add_argument("--out", default="results")
args = p.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
for case in ("case1", "case2"):
    cfg = ExperimentConfig.for_study("convergence", case=case, trials=args.trials, T=args.T, r=args.r,
                                     seed=args.seed, workers=args.workers)
    res = run_convergence_study(cfg)
    (out / f"convergence_{case}.csv").write_text(res.to_csv())
    write_svg(out / f"convergence_{case}.svg", res.table(), "T", f"convergence: {case}")
    for rule, (ts, ys) in res.table().items():
        print(f"{case} {rule:12s} T=1 {ys[0]:.4f}  T=5 {ys[4]:.4f}  T={ts[-1]} {ys[-1]:.4f}")
