"""Noiseless D5 comparison: search with op1 and op2, then fine-tune the rank-1
circuits next to the 23-gate baseline from one shared theta0.

    python scripts/reproduce_convergence.py --out runs/convergence [--trials 200]
"""

from __future__ import annotations

import argparse
import json
import time
from dataclasses import replace
from pathlib import Path

from jssp_dqas import experiments as ex

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs/d5_op1.json"))
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default="runs/convergence")
    args = ap.parse_args(argv)
    cfg = ex.ExperimentConfig.load(args.config)
    cfg = replace(cfg, **{k: v for k, v in (("trials", args.trials), ("seed", args.seed)) if v is not None})
    t0 = time.time()
    reports, outcomes = ex.convergence_study(cfg, out=args.out, plot=True)
    for pool, found in outcomes.items():
        print(json.dumps({"pool": pool, "rank1_gates": found.gate_counts[0]}))
    for r in reports:
        print(json.dumps({"label": r.label, **r.summary()}))
    print(f"done in {time.time() - t0:.1f}s -> {args.out}")


if __name__ == "__main__":
    main()
