#!/usr/bin/env python3
"""Connectivity study for both cases: SN-Train vs local-only vs centralized over r.

    python scripts/run_connectivity.py --trials 300 --workers 8
"""
import argparse
from pathlib import Path

from sntrain.cli import write_svg
from sntrain.experiments import ExperimentConfig, run_connectivity_study

p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
p.add_argument("--trials", type=int, default=20)
p.add_argument("--seed", type=int, default=20070101)
p.add_argument("--workers", type=int, default=1)
p.add_argument("--cases", nargs="+", default=["case1", "case2"])
p.add_argument("--out", default="results")
args = p.parse_args()

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
for case in args.cases:
    cfg = ExperimentConfig.for_study("connectivity", case=case, trials=args.trials, seed=args.seed,
                                     workers=args.workers)
    res = run_connectivity_study(cfg)
    (out / f"connectivity_{case}.csv").write_text(res.to_csv())
    write_svg(out / f"connectivity_{case}.svg", res.table(x="r"), "r", f"connectivity: {case}")
    table = res.table(x="r")
    print(f"{case}: r, sn_train, local_only, centralized")
    for i, r in enumerate(table["sn_train"][0]):
        print(f"  {r:5.2f} " + "  ".join(f"{table[m][1][i]:10.4f}" for m in ("sn_train", "local_only", "centralized")))
