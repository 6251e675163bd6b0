"""Structure sweeps: placeholder count with op1 and block count with op2.

    python scripts/reproduce_sweeps.py --out runs/sweeps
"""

from __future__ import annotations

import argparse
import time
from dataclasses import replace
from pathlib import Path

from jssp_dqas import experiments as ex

ROOT = Path(__file__).resolve().parents[1]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--placeholders", default="1,2,3,4,5,6")
    ap.add_argument("--blocks", default="1,2,3")
    ap.add_argument("--seeds", default="0", help="comma separated master seeds")
    ap.add_argument("--out", default="runs/sweeps")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    plan = [("placeholders", "sweep_placeholders_op1.json", args.placeholders),
            ("blocks", "sweep_blocks_op2.json", args.blocks)]
    for axis, cfg_name, values in plan:
        base = ex.ExperimentConfig.load(ROOT / "configs" / cfg_name)
        rows = []
        for seed in (int(s) for s in args.seeds.split(",")):
            for row in ex.sweep_structure(replace(base, seed=seed), axis, [int(v) for v in values.split(",")]):
                rows.append({"seed": seed, **row})
        (out / f"sweep_{axis}.csv").write_text(ex.rows_csv(rows))
        for r in rows:
            print(r)
    print(f"done in {time.time() - t0:.1f}s -> {out}")


if __name__ == "__main__":
    main()
