"""Command line entry point: ``jssp-dqas {search,evaluate,noise-study,sweep,oracle}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import ansatz, experiments as ex
from .qubo import decode_schedule, export_qubo
from .simulator import NoiseSpec

log = logging.getLogger("jssp_dqas")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message}), file=sys.stderr)
        sys.exit(2)


def _config(args) -> ex.ExperimentConfig:
    cfg = ex.ExperimentConfig.load(args.config) if args.config else ex.ExperimentConfig()
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if args.trials is not None:
        over["trials"] = args.trials
    if args.pool is not None:
        over["pool"] = args.pool
    if args.noise is not None:
        NoiseSpec.parse(args.noise)
        over["noise"] = args.noise
    if args.workers is not None:
        over["workers"] = args.workers
    if args.baseline:
        over["baseline"] = True
    return replace(cfg, **over) if over else cfg


def _searched_circuits(args, cfg, prob, out: Path):
    """Rank-1 circuit from ``--arch`` or from a fresh search written under ``out/search``."""
    if args.arch:
        archs = ex.load_archs(args.arch, prob.pool)
    else:
        archs = ex.run_search(cfg, out / "search", prob).top
    return [ex.arch_circuit(prob, archs[0])]


def cmd_oracle(args) -> int:
    cfg = _config(args)
    prob = ex.setup(cfg)
    b = prob.bounds
    sched = decode_schedule(prob.qubo, b.argmin)
    report = {"num_vars": prob.qubo.num_vars, "variables": [list(v) for v in prob.qubo.variables],
              "e_min": b.e_min, "e_max": b.e_max, "e_target": b.e_target,
              "argmin": "".join(map(str, b.argmin)), "feasible": sched.feasible}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "oracle.json").write_text(json.dumps(report, indent=1) + "\n")
    (out / "qubo.txt").write_text(export_qubo(prob.qubo))
    print(json.dumps(report))
    print(sched.describe(prob.qubo.instance))
    return 0


def cmd_search(args) -> int:
    cfg = _config(args)
    prob = ex.setup(cfg)
    outcome = ex.run_search(cfg, Path(args.out), prob)
    for rank, (arch, n) in enumerate(zip(outcome.top, outcome.gate_counts), 1):
        print(f"rank {rank}: {'+'.join(prob.pool[c].label() for c in arch)} ({n} gates)")
    gates, _ = ansatz.assemble_circuit(prob.pc, prob.pool, outcome.top[0])
    print(ansatz.draw(gates, prob.pc.n))
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    prob = ex.setup(cfg)
    out = Path(args.out)
    circuits = [] if args.baseline_only else _searched_circuits(args, cfg, prob, out)
    if cfg.baseline or args.baseline_only:
        circuits.append(ex.baseline(prob))
    reports, _ = ex.evaluate_circuits(circuits, cfg, prob, cfg.noise_spec)
    ex.emit_outputs(reports, out, plot=not args.no_plot)
    for r in reports:
        print(f"{r.label}: gates={r.gate_count} asp={r.asp} final={r.mean[-1]:.4g}±{r.std[-1]:.4g}")
    return 0


def cmd_noise_study(args) -> int:
    cfg = _config(args)
    prob = ex.setup(cfg)
    out = Path(args.out)
    circuits = _searched_circuits(args, cfg, prob, out) + [ex.baseline(prob)]
    if args.noise:
        spec = NoiseSpec.parse(args.noise)
        cfg = replace(cfg, noise_kinds=(spec.kind,), noise_p=spec.p, noise_placement=spec.placement)
    study = ex.noise_study(circuits, cfg, prob)
    for kind, reports in study.items():
        ex.emit_outputs(reports, out / kind, plot=not args.no_plot)
        for r in reports:
            print(f"{kind} {r.label}: asp={r.asp} final={r.mean[-1]:.4g}±{r.std[-1]:.4g} min={r.final_min:.4g}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    values = [int(v) for v in args.values.split(",")]
    rows = ex.sweep_structure(cfg, args.axis, values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"sweep_{args.axis}.csv").write_text(ex.rows_csv(rows))
    for r in rows:
        print(r)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jssp-dqas", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="experiment config JSON")
    common.add_argument("--seed", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--out", default="runs/out")
    common.add_argument("--noise", help="kind:prob[:placement]")
    common.add_argument("--pool", choices=["op1", "op2"])
    common.add_argument("--baseline", action="store_true", help="include the baseline circuit")
    common.add_argument("--workers", type=int, help="parallel trial processes")
    common.add_argument("--no-plot", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("oracle", parents=[common], help="enumerate the QUBO").set_defaults(func=cmd_oracle)
    sub.add_parser("search", parents=[common], help="super-circuit training").set_defaults(func=cmd_search)
    p = sub.add_parser("evaluate", parents=[common], help="fine-tune and report ASP")
    p.add_argument("--arch", help="archs.json from a previous search")
    p.add_argument("--baseline-only", action="store_true")
    p.set_defaults(func=cmd_evaluate)
    p = sub.add_parser("noise-study", parents=[common], help="evaluate under Pauli noise")
    p.add_argument("--arch", help="archs.json from a previous search")
    p.set_defaults(func=cmd_noise_study)
    p = sub.add_parser("sweep", parents=[common], help="placeholder / block sweep")
    p.add_argument("--axis", choices=["placeholders", "blocks"], required=True)
    p.add_argument("--values", required=True, help="comma separated, e.g. 1,2,3,4")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        if args.verbose:
            raise
        return 1


if __name__ == "__main__":
    sys.exit(main())
