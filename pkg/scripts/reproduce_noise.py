"""Noisy D5 comparison: rank-1 op1/op2 circuits and the baseline under bitflip,
phaseflip and depolarizing Pauli noise at p = 0.2 on both ends of every qubit.

    python scripts/reproduce_noise.py --out runs/noise
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
    ap.add_argument("--config", default=str(ROOT / "configs/d5_noise.json"))
    ap.add_argument("--trials", type=int)
    ap.add_argument("--out", default="runs/noise")
    args = ap.parse_args(argv)
    cfg = ex.ExperimentConfig.load(args.config)
    if args.trials:
        cfg = replace(cfg, trials=args.trials)
    t0 = time.time()
    study = ex.noise_comparison(cfg, out=args.out, plot=True)
    for kind, reports in study.items():
        for r in reports:
            print(json.dumps({"noise": kind, "label": r.label, **r.summary()}))
    print(f"done in {time.time() - t0:.1f}s -> {args.out}")


if __name__ == "__main__":
    main()
