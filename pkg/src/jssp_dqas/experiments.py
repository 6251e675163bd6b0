"""Experiment harness: search, fixed-architecture evaluation, noise and structure studies."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import ansatz, dqas
from .qubo import EnergyBounds, QuboProblem, brute_force_oracle, compile_instance, load_instance
from .simulator import GateInstr, NoiseSpec, probabilities, run_circuit

log = logging.getLogger(__name__)

BASELINE_LABEL = "baseline"


@dataclass(frozen=True)
class ExperimentConfig:
    instance: str = "d5"
    pool: str = "op1"
    placeholders: int = 4
    block_count: int = 1
    trials: int = 50
    epochs: int = 30
    # search
    search_epochs: int = 150
    batch: int = 8
    shots: int = 1000
    cvar_fraction: float = 0.25
    lr_alpha: float = 0.15
    lr_theta: float = 0.05
    baseline_subtract: bool = True
    top_k: int = 5
    # evaluation
    lr_eval: float = 0.3
    theta_init_scale: float = math.pi
    asp_tolerance: float = 1e-3
    baseline: bool = True
    noise: Optional[str] = None
    noise_kinds: Tuple[str, ...] = ("bitflip", "phaseflip", "depolarizing")
    noise_p: float = 0.2
    noise_placement: str = "both"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.epochs < 0 or self.search_epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.noise is not None:
            NoiseSpec.parse(self.noise)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if "noise_kinds" in data:
            data["noise_kinds"] = tuple(data["noise_kinds"])
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        data = json.loads(path.read_text())
        inst = data.get("instance")
        # instance paths in a config resolve relative to the config file
        if inst and inst != "d5" and not Path(inst).is_absolute():
            data["instance"] = str((path.parent / inst).resolve())
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["noise_kinds"] = list(self.noise_kinds)
        return d

    @property
    def dqas(self) -> dqas.DqasConfig:
        return dqas.DqasConfig(self.batch, self.shots, self.cvar_fraction, self.lr_alpha, self.lr_theta,
                               self.search_epochs, self.baseline_subtract, self.top_k, self.seed)

    @property
    def cvar(self) -> dqas.CvarConfig:
        return dqas.CvarConfig(self.shots, self.cvar_fraction)

    @property
    def noise_spec(self) -> Optional[NoiseSpec]:
        return None if self.noise is None else NoiseSpec.parse(self.noise)


@dataclass
class Problem:
    qubo: QuboProblem
    bounds: EnergyBounds
    pc: ansatz.PlaceholderCircuit
    pool: ansatz.OperationPool


def setup(cfg: ExperimentConfig) -> Problem:
    inst, weights = load_instance(cfg.instance)
    qubo = compile_instance(inst, weights)
    bounds = brute_force_oracle(qubo)
    pc = ansatz.make_placeholder_circuit(qubo.num_vars, cfg.placeholders, cfg.block_count)
    return Problem(qubo, bounds, pc, ansatz.make_pool(cfg.pool, qubo.num_vars))


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass
class SearchOutcome:
    pool: str
    top: List[Tuple[int, ...]]
    gate_counts: List[int]
    result: dqas.SearchResult

    def archs_json(self, pool: ansatz.OperationPool) -> dict:
        return {"pool": self.pool,
                "top": [ansatz.arch_to_json(pool, a) for a in self.top],
                "gate_counts": self.gate_counts}


def run_search(cfg: ExperimentConfig, out: Optional[Path] = None,
               problem: Optional[Problem] = None) -> SearchOutcome:
    prob = problem or setup(cfg)
    res = dqas.search(prob.qubo, prob.bounds, prob.pc, prob.pool, cfg.dqas, cfg.noise_spec)
    counts = [ansatz.gate_count(ansatz.assemble_circuit(prob.pc, prob.pool, a)[0]) for a in res.top]
    outcome = SearchOutcome(cfg.pool, res.top, counts, res)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        dqas.save_checkpoint(res.state, out / "checkpoint.json", {"seed": cfg.seed, "pool": cfg.pool})
        (out / "train_log.csv").write_text(res.log_csv())
        (out / "archs.json").write_text(json.dumps(outcome.archs_json(prob.pool), indent=1) + "\n")
    return outcome


def load_archs(path, pool: ansatz.OperationPool) -> List[List[int]]:
    data = json.loads(Path(path).read_text())
    if data.get("pool") not in (None, pool.name):
        raise ValueError(f"architectures were searched over {data['pool']}, config uses {pool.name}")
    return [ansatz.arch_from_json(pool, a) for a in data["top"]]


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    curve: List[float]
    final_bits: Tuple[int, ...]
    arch: str
    gate_count: int


@dataclass
class AspReport:
    label: str
    asp: Optional[int]
    mean: List[float]
    std: List[float]
    trials: int
    gate_count: int
    param_count: int
    final_min: float
    solved_fraction: float

    def summary(self) -> dict:
        return {"asp": self.asp, "gate_count": self.gate_count, "param_count": self.param_count,
                "trials": self.trials, "final_mean": self.mean[-1], "final_std": self.std[-1],
                "final_min": self.final_min, "solved_fraction": self.solved_fraction}


def compute_asp(mean_curve: Sequence[float], tol: float) -> Optional[int]:
    """First epoch whose trial-mean scaled energy is within ``tol`` of the optimum."""
    for i, e in enumerate(mean_curve):
        if e <= tol:
            return i
    return None


def shared_theta0(cfg: ExperimentConfig, size: int) -> np.ndarray:
    """One initial parameter draw per experiment; circuits take a prefix."""
    rng = np.random.default_rng([cfg.seed, 0x7E7A])
    return rng.uniform(-cfg.theta_init_scale, cfg.theta_init_scale, size)


def trial_seed(cfg: ExperimentConfig, trial: int) -> List[int]:
    """Per-trial stream: SeedSequence entropy [master seed, 0xE7, trial]."""
    return [cfg.seed, 0xE7, trial]


@dataclass(frozen=True)
class Circuit:
    label: str
    gates: Tuple[GateInstr, ...]
    param_count: int
    encoding_len: int

    @property
    def gate_count(self) -> int:
        return ansatz.gate_count(self.gates)


def arch_circuit(prob: Problem, arch: Sequence[int], label: Optional[str] = None) -> Circuit:
    gates, k = ansatz.assemble_circuit(prob.pc, prob.pool, arch)
    label = label or "+".join(prob.pool[c].label() for c in arch)
    return Circuit(label, tuple(gates), k, len(prob.pc.encoding))


def baseline(prob: Problem) -> Circuit:
    gates, k = ansatz.baseline_circuit(prob.pc.n)
    return Circuit(BASELINE_LABEL, tuple(gates), k, prob.pc.n)


def _run_trial(args) -> TrialRecord:
    circ, theta0, qubo, bounds, cvar, epochs, lr, seed, noise = args
    theta, curve = dqas.fine_tune(circ.gates, theta0, qubo, bounds, cvar, epochs, lr, seed, noise,
                                  circ.encoding_len)
    probs = probabilities(run_circuit(circ.gates, theta, qubo.num_vars))
    best = int(np.argmax(probs))
    bits = tuple((best >> (qubo.num_vars - 1 - k)) & 1 for k in range(qubo.num_vars))
    return TrialRecord(curve, bits, circ.label, circ.gate_count)


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def evaluate_circuits(circuits: Sequence[Circuit], cfg: ExperimentConfig, prob: Problem,
                      noise: Optional[NoiseSpec] = None) -> Tuple[List[AspReport], Dict[str, List[TrialRecord]]]:
    """Fine-tune every circuit over ``cfg.trials`` trials from one shared theta0.

    All circuits see the same theta0 prefix policy, trial seeds, shots and learning rate.
    """
    if noise is not None and noise.p == 0.0:
        noise = None
    size = max([c.param_count for c in circuits] + [1])
    theta0 = shared_theta0(cfg, size)
    reports, records = [], {}
    for circ in circuits:
        jobs = [(circ, theta0[:circ.param_count], prob.qubo, prob.bounds, cfg.cvar, cfg.epochs,
                 cfg.lr_eval, trial_seed(cfg, t), noise) for t in range(cfg.trials)]
        recs = _map(_run_trial, jobs, cfg.workers)
        curves = np.array([r.curve for r in recs])
        if not np.all(np.isfinite(curves)) or curves.min() < -1e-12 or curves.max() > 1 + 1e-12:
            raise FloatingPointError(f"{circ.label}: scaled energy left [0, 1]")
        mean, std = curves.mean(axis=0), curves.std(axis=0)
        final = curves[:, -1]
        reports.append(AspReport(circ.label, compute_asp(mean, cfg.asp_tolerance), mean.tolist(), std.tolist(),
                                 cfg.trials, circ.gate_count, circ.param_count, float(final.min()),
                                 float(np.mean(final <= cfg.asp_tolerance))))
        records[circ.label] = recs
    return reports, records


def evaluate_arch(arch: Optional[Sequence[int]], cfg: ExperimentConfig, prob: Optional[Problem] = None,
                  noise: Optional[NoiseSpec] = None) -> Tuple[AspReport, List[TrialRecord]]:
    """Evaluate one architecture (``None`` selects the baseline)."""
    prob = prob or setup(cfg)
    circ = baseline(prob) if arch is None else arch_circuit(prob, arch)
    reports, records = evaluate_circuits([circ], cfg, prob, noise)
    return reports[0], records[circ.label]


def noise_study(circuits: Sequence[Circuit], cfg: ExperimentConfig, prob: Problem,
                kinds: Optional[Sequence[str]] = None) -> Dict[str, List[AspReport]]:
    out = {}
    for kind in kinds or cfg.noise_kinds:
        spec = NoiseSpec(kind, cfg.noise_p, cfg.noise_placement)
        out[kind] = evaluate_circuits(circuits, cfg, prob, spec)[0]
    return out


def sweep_structure(cfg: ExperimentConfig, axis: str, values: Sequence[int]) -> List[dict]:
    """Search then evaluate at each structure size; the baseline row is appended last."""
    if axis not in ("placeholders", "blocks"):
        raise ValueError("axis must be 'placeholders' or 'blocks'")
    rows = []
    for v in values:
        if v < 1:
            raise ValueError("sweep values must be >= 1")
        sub = replace(cfg, placeholders=v) if axis == "placeholders" else replace(cfg, block_count=v)
        prob = setup(sub)
        found = run_search(sub, problem=prob)
        circ = arch_circuit(prob, found.top[0])
        rep = evaluate_circuits([circ], sub, prob)[0][0]
        rows.append({"axis": axis, "value": v, "arch": circ.label, "gate_count": circ.gate_count,
                     "param_count": circ.param_count, "asp": rep.asp, "final_mean": rep.mean[-1]})
    prob = setup(cfg)
    rep = evaluate_circuits([baseline(prob)], cfg, prob)[0][0]
    rows.append({"axis": axis, "value": BASELINE_LABEL, "arch": BASELINE_LABEL, "gate_count": rep.gate_count,
                 "param_count": rep.param_count, "asp": rep.asp, "final_mean": rep.mean[-1]})
    return rows


def searched_circuits(cfg: ExperimentConfig, pools: Sequence[str] = ("op1", "op2"),
                      out=None) -> Tuple[Problem, List[Circuit], Dict[str, SearchOutcome]]:
    """Noiseless search per pool; returns the rank-1 circuits followed by the baseline."""
    circuits, outcomes = [], {}
    for pool in pools:
        sub = replace(cfg, pool=pool, noise=None)
        prob = setup(sub)
        found = run_search(sub, None if out is None else Path(out) / f"search_{pool}", prob)
        outcomes[pool] = found
        circuits.append(arch_circuit(prob, found.top[0], label=f"circuit_{pool}"))
    prob = setup(cfg)
    circuits.append(baseline(prob))
    return prob, circuits, outcomes


def convergence_study(cfg: ExperimentConfig, out=None, plot: bool = False,
                      found: Optional[Tuple[Problem, List[Circuit], Dict[str, SearchOutcome]]] = None):
    """Noiseless fine-tuning of the searched circuits next to the baseline."""
    prob, circuits, outcomes = found or searched_circuits(cfg, out=out)
    reports, _ = evaluate_circuits(circuits, replace(cfg, noise=None), prob)
    if out is not None:
        emit_outputs(reports, out, plot=plot)
    return reports, outcomes


def noise_comparison(cfg: ExperimentConfig, out=None, plot: bool = False,
                     found: Optional[Tuple[Problem, List[Circuit], Dict[str, SearchOutcome]]] = None):
    """The same circuits under every configured noise kind."""
    prob, circuits, _ = found or searched_circuits(cfg, out=out)
    study = noise_study(circuits, cfg, prob)
    if out is not None:
        for kind, reports in study.items():
            emit_outputs(reports, Path(out) / kind, plot=plot)
    return study


# ---------------------------------------------------------------------------
# outputs
# ---------------------------------------------------------------------------

CURVE_FIELDS = ("series", "epoch", "mean_e", "std_e")


def curves_csv(reports: Sequence[AspReport]) -> str:
    if not reports:
        raise ValueError("no reports to write")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_FIELDS)
    for rep in reports:
        if not rep.mean:
            raise ValueError(f"series {rep.label!r} has an empty epoch list")
        for ep, (m, s) in enumerate(zip(rep.mean, rep.std)):
            w.writerow([rep.label, ep, repr(float(m)), repr(float(s))])
    return buf.getvalue()


def read_curves(text: str) -> Dict[str, List[float]]:
    out: Dict[str, List[float]] = {}
    for row in csv.DictReader(io.StringIO(text)):
        out.setdefault(row["series"], []).append(float(row["mean_e"]))
    return out


def emit_outputs(reports: Sequence[AspReport], out, extra: Optional[dict] = None, plot: bool = True) -> None:
    """Write curves.csv, summary.json and (optionally) curves.png."""
    text = curves_csv(reports)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "curves.csv").write_text(text)
    summary = {rep.label: rep.summary() for rep in reports}
    if extra:
        summary.update(extra)
    (out / "summary.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    if plot:
        plot_curves(reports, out / "curves.png")


def plot_curves(reports: Sequence[AspReport], path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for rep in reports:
        m, s = np.array(rep.mean), np.array(rep.std)
        x = np.arange(len(m))
        ax.plot(x, m, label=f"{rep.label} ({rep.gate_count} gates)")
        ax.fill_between(x, np.clip(m - s, 0, 1), np.clip(m + s, 0, 1), alpha=0.2)
    ax.set_xlabel("epoch")
    ax.set_ylabel("scaled energy e")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def rows_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
