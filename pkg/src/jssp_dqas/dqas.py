"""Super-circuit training: architecture distribution, CVaR loss, gradients, Adam."""

from __future__ import annotations

import csv
import heapq
import io
import json
import math
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ansatz import OperationPool, PlaceholderCircuit, assemble_shared, bank_size
from .qubo import EnergyBounds, QuboProblem, scale_energy
from .simulator import GateInstr, NoiseSpec, probabilities, run_circuit, sample_noisy_indices

SHIFT = math.pi / 2


@dataclass(frozen=True)
class CvarConfig:
    """``exact=True`` replaces sampling by the tail expectation of |amplitude|^2."""

    shots: int = 1000
    cvar_fraction: float = 0.25
    exact: bool = False

    def __post_init__(self):
        if not 0 < self.cvar_fraction <= 1:
            raise ValueError("cvar_fraction must lie in (0, 1]")
        if not self.exact and math.ceil(self.cvar_fraction * self.shots) < 1:
            raise ValueError("cvar_fraction * shots must keep at least one sample")

    @property
    def tail(self) -> int:
        return math.ceil(self.cvar_fraction * self.shots - 1e-12)


def cvar_of_samples(energies, cvar_fraction: float) -> float:
    """Mean of the lowest ceil(fraction * K) energies."""
    e = np.sort(np.asarray(energies, dtype=float))
    k = max(1, math.ceil(cvar_fraction * len(e) - 1e-12))
    return float(e[:k].mean())


def cvar_of_distribution(probs, energies, cvar_fraction: float) -> float:
    """Expected energy over the lowest-energy ``cvar_fraction`` of probability mass."""
    order = np.argsort(energies, kind="stable")
    p = np.asarray(probs, dtype=float)[order]
    e = np.asarray(energies, dtype=float)[order]
    if cvar_fraction >= 1.0:
        return float(p @ e)
    before = np.concatenate(([0.0], np.cumsum(p)[:-1]))
    w = np.clip(cvar_fraction - before, 0.0, p)
    return float(w @ e / cvar_fraction)


def cvar_energy(gates: Sequence[GateInstr], theta, qubo: QuboProblem, cfg: CvarConfig,
                noise: Optional[NoiseSpec] = None, rng_seed=0, encoding_len: int = 0) -> float:
    """C(theta): run, sample K bitstrings, average the best ceil(fraction * K) energies."""
    n = qubo.num_vars
    table = qubo.energy_table()
    if cfg.exact:
        if noise is not None and noise.p > 0:
            raise ValueError("exact mode does not model noise")
        return cvar_of_distribution(probabilities(run_circuit(gates, theta, n)), table, cfg.cvar_fraction)
    rng = np.random.default_rng(rng_seed)
    idx = sample_noisy_indices(gates, theta, n, noise, cfg.shots, rng, encoding_len)
    return cvar_of_samples(table[idx], cfg.cvar_fraction)


def local_loss(C: float, e_target: float) -> float:
    return (C - e_target) ** 2


def param_shift_grad(gates: Sequence[GateInstr], theta, qubo: QuboProblem, cfg: CvarConfig,
                     e_target: float, rng_seed=0, noise: Optional[NoiseSpec] = None,
                     encoding_len: int = 0) -> Tuple[float, np.ndarray]:
    """Return (C, dL/dtheta) for L = (C - E_target)^2, gradient over the full theta vector.

    Every +/- evaluation reuses ``rng_seed`` (common random numbers).
    """
    theta = np.asarray(theta, dtype=float)
    C = cvar_energy(gates, theta, qubo, cfg, noise, rng_seed, encoding_len)
    grad = np.zeros_like(theta)
    slots = sorted({s for g in gates for s in g.param_slots})
    for s in slots:
        plus, minus = theta.copy(), theta.copy()
        plus[s] += SHIFT
        minus[s] -= SHIFT
        dC = 0.5 * (cvar_energy(gates, plus, qubo, cfg, noise, rng_seed, encoding_len)
                    - cvar_energy(gates, minus, qubo, cfg, noise, rng_seed, encoding_len))
        grad[s] += 2.0 * (C - e_target) * dC
    return C, grad


# ---------------------------------------------------------------------------
# architecture distribution
# ---------------------------------------------------------------------------

def arch_probabilities(alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    z = np.exp(a - a.max(axis=1, keepdims=True))
    return z / z.sum(axis=1, keepdims=True)


def arch_log_prob(alpha, arch: Sequence[int]) -> float:
    p = arch_probabilities(alpha)
    return float(sum(np.log(p[r, c]) for r, c in enumerate(arch)))


def row_entropy(alpha) -> np.ndarray:
    p = arch_probabilities(alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        return -np.where(p > 0, p * np.log(p), 0.0).sum(axis=1)


def sample_batch(alpha, batch_size: int, rng_seed) -> List[Tuple[int, ...]]:
    if batch_size < 1:
        raise ValueError("batch size must be >= 1")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    p = arch_probabilities(alpha)
    cdf = np.cumsum(p, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random((batch_size, p.shape[0]))
    choices = (cdf[None, :, :] <= u[:, :, None]).sum(axis=2)
    return [tuple(int(c) for c in row) for row in choices]


def grad_alpha(batch: Sequence[Sequence[int]], losses: Sequence[float], alpha,
               baseline: bool = True) -> np.ndarray:
    """Score-function gradient sum_U L(U) grad log P(U, alpha).

    With ``baseline`` each loss is reduced by the mean loss of the *other*
    batch members, which keeps the estimator unbiased.
    """
    p = arch_probabilities(alpha)
    losses = np.asarray(losses, dtype=float)
    B = len(batch)
    if len(losses) != B:
        raise ValueError("batch and losses differ in length")
    if baseline and B > 1:
        weights = losses - (losses.sum() - losses) / (B - 1)
    else:
        weights = losses
    grad = np.zeros_like(p)
    rows = np.arange(p.shape[0])
    for arch, w in zip(batch, weights):
        score = -p.copy()
        score[rows, list(arch)] += 1.0
        grad += w * score
    return grad


def exact_alpha_gradient(alpha, loss_of, batch_size: int = 1) -> np.ndarray:
    """d/dalpha of batch_size * sum_U P(U) L(U) by enumerating every architecture."""
    import itertools
    p = arch_probabilities(alpha)
    grad = np.zeros_like(p)
    rows = np.arange(p.shape[0])
    for arch in itertools.product(*(range(p.shape[1]) for _ in rows)):
        prob = float(np.prod(p[rows, list(arch)]))
        score = -p.copy()
        score[rows, list(arch)] += 1.0
        grad += prob * loss_of(arch) * score
    return batch_size * grad


def top_k(alpha, k: int) -> List[Tuple[int, ...]]:
    """The k most probable assignments, best-first; equal probabilities break by index order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    logp = np.log(arch_probabilities(alpha))
    R, s = logp.shape
    # per-row candidate order: probability descending, then index ascending
    orders = [sorted(range(s), key=lambda c, r=r: (-logp[r, c], c)) for r in range(R)]

    def key(ranks):
        arch = tuple(orders[r][ranks[r]] for r in range(R))
        score = sum(logp[r, c] for r, c in enumerate(arch))
        return (-round(score, 10), arch), arch

    start = (0,) * R
    heap = [key(start) + (start,)]
    seen = {start}
    out = []
    while heap and len(out) < k:
        _, arch, ranks = heapq.heappop(heap)
        out.append(arch)
        for r in range(R):
            if ranks[r] + 1 < s:
                nxt = ranks[:r] + (ranks[r] + 1,) + ranks[r + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, key(nxt) + (nxt,))
    return out


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def like(cls, params) -> "AdamState":
        z = np.zeros(np.shape(params))
        return cls(z.copy(), z.copy(), 0)

    def to_dict(self) -> dict:
        return {"m": self.m.tolist(), "v": self.v.tolist(), "t": self.t}

    @classmethod
    def from_dict(cls, d) -> "AdamState":
        return cls(np.array(d["m"], dtype=float), np.array(d["v"], dtype=float), int(d["t"]))


BETA1, BETA2, EPS = 0.9, 0.999, 1e-8


def adam_step(params, grads, state: AdamState, lr: float) -> Tuple[np.ndarray, AdamState]:
    params = np.asarray(params, dtype=float)
    grads = np.asarray(grads, dtype=float)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError(f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}")
    t = state.t + 1
    m = BETA1 * state.m + (1 - BETA1) * grads
    v = BETA2 * state.v + (1 - BETA2) * grads ** 2
    m_hat = m / (1 - BETA1 ** t)
    v_hat = v / (1 - BETA2 ** t)
    return params - lr * m_hat / (np.sqrt(v_hat) + EPS), AdamState(m, v, t)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DqasConfig:
    batch: int = 8
    shots: int = 1000
    cvar_fraction: float = 0.25
    lr_alpha: float = 0.15
    lr_theta: float = 0.05
    epochs: int = 50
    baseline_subtract: bool = True
    top_k: int = 5
    seed: int = 0

    @property
    def cvar(self) -> CvarConfig:
        return CvarConfig(self.shots, self.cvar_fraction)


@dataclass
class SuperCircuitState:
    alpha: np.ndarray
    theta: np.ndarray
    adam_alpha: AdamState
    adam_theta: AdamState
    epoch: int = 0

    @classmethod
    def initial(cls, pc: PlaceholderCircuit, pool: OperationPool, seed: int) -> "SuperCircuitState":
        rng = np.random.default_rng([seed, 0xA1])
        alpha = np.zeros((pc.slots, pool.size))
        theta = rng.uniform(0.0, 2 * math.pi, size=bank_size(pc))
        return cls(alpha, theta, AdamState.like(alpha), AdamState.like(theta), 0)

    def to_dict(self) -> dict:
        return {"epoch": self.epoch, "alpha": self.alpha.tolist(), "theta": self.theta.tolist(),
                "adam_alpha": self.adam_alpha.to_dict(), "adam_theta": self.adam_theta.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "SuperCircuitState":
        return cls(np.array(d["alpha"], dtype=float), np.array(d["theta"], dtype=float),
                   AdamState.from_dict(d["adam_alpha"]), AdamState.from_dict(d["adam_theta"]),
                   int(d["epoch"]))


@dataclass
class BatchResult:
    archs: List[Tuple[int, ...]]
    losses: List[float]
    cvars: List[float]

    @property
    def global_loss(self) -> float:
        return float(sum(self.losses))


def evaluate_batch(state: SuperCircuitState, archs, pc: PlaceholderCircuit, pool: OperationPool,
                   qubo: QuboProblem, cfg: CvarConfig, e_target: float, seed_base,
                   noise: Optional[NoiseSpec] = None) -> Tuple[BatchResult, np.ndarray]:
    """Local losses for every sampled architecture and the summed theta gradient."""
    grad = np.zeros_like(state.theta)
    losses, cvars = [], []
    for i, arch in enumerate(archs):
        gates = assemble_shared(pc, pool, arch)
        C, g = param_shift_grad(gates, state.theta, qubo, cfg, e_target,
                                list(seed_base) + [i], noise, len(pc.encoding))
        grad += g
        cvars.append(C)
        losses.append(local_loss(C, e_target))
    return BatchResult(list(archs), losses, cvars), grad


def grad_theta(batch, state: SuperCircuitState, pc, pool, qubo, cfg: CvarConfig, e_target: float,
               seed_base=(0,), noise=None) -> np.ndarray:
    return evaluate_batch(state, batch, pc, pool, qubo, cfg, e_target, seed_base, noise)[1]


LOG_FIELDS = ("epoch", "global_loss", "min_local_loss")


@dataclass
class SearchResult:
    state: SuperCircuitState
    log: List[dict]
    top: List[Tuple[int, ...]]

    def log_csv(self) -> str:
        if not self.log:
            return ""
        buf = io.StringIO()
        fields = list(self.log[0].keys())
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in self.log:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()


def train_epoch(state: SuperCircuitState, pc, pool, qubo, e_target: float, cfg: DqasConfig,
                noise=None) -> dict:
    """One Algorithm-1 iteration: sample, score, update alpha and theta in place."""
    ep = state.epoch
    archs = sample_batch(state.alpha, cfg.batch, np.random.default_rng([cfg.seed, ep, 0]))
    result, g_theta = evaluate_batch(state, archs, pc, pool, qubo, cfg.cvar, e_target,
                                     [cfg.seed, ep, 1], noise)
    g_alpha = grad_alpha(archs, result.losses, state.alpha, cfg.baseline_subtract)
    row = {"epoch": ep, "global_loss": result.global_loss, "min_local_loss": float(min(result.losses))}
    for r, h in enumerate(row_entropy(state.alpha)):
        row[f"entropy_{r}"] = float(h)
    state.alpha, state.adam_alpha = adam_step(state.alpha, g_alpha, state.adam_alpha, cfg.lr_alpha)
    state.theta, state.adam_theta = adam_step(state.theta, g_theta, state.adam_theta, cfg.lr_theta)
    state.epoch += 1
    return row


def search(qubo: QuboProblem, bounds: EnergyBounds, pc: PlaceholderCircuit, pool: OperationPool,
           cfg: DqasConfig, noise: Optional[NoiseSpec] = None,
           state: Optional[SuperCircuitState] = None) -> SearchResult:
    """Run (or resume) super-circuit training and return the top-k architectures."""
    if pc.n != qubo.num_vars:
        raise ValueError(f"circuit has {pc.n} qubits but the QUBO has {qubo.num_vars} variables")
    if state is None:
        state = SuperCircuitState.initial(pc, pool, cfg.seed)
    log = []
    while state.epoch < cfg.epochs:
        log.append(train_epoch(state, pc, pool, qubo, bounds.e_target, cfg, noise))
    return SearchResult(state, log, top_k(state.alpha, cfg.top_k))


def save_checkpoint(state: SuperCircuitState, path, extra: Optional[dict] = None) -> None:
    data = state.to_dict()
    if extra:
        data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)


def load_checkpoint(path) -> SuperCircuitState:
    with open(path) as fh:
        return SuperCircuitState.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# fixed-architecture training
# ---------------------------------------------------------------------------

def fine_tune(gates: Sequence[GateInstr], theta_init, qubo: QuboProblem, bounds: EnergyBounds,
              cfg: CvarConfig, epochs: int, lr: float, seed, noise: Optional[NoiseSpec] = None,
              encoding_len: int = 0) -> Tuple[np.ndarray, List[float]]:
    """Adam on theta alone.  The curve holds the scaled CVaR energy before each update and after the last."""
    theta = np.asarray(theta_init, dtype=float).copy()
    adam = AdamState.like(theta)
    seed = list(np.atleast_1d(seed))
    curve = []
    for ep in range(epochs + 1):
        rs = seed + [ep]
        if ep == epochs:
            C = cvar_energy(gates, theta, qubo, cfg, noise, rs, encoding_len)
            curve.append(scale_energy(C, bounds))
            break
        C, g = param_shift_grad(gates, theta, qubo, cfg, bounds.e_target, rs, noise, encoding_len)
        curve.append(scale_energy(C, bounds))
        if theta.size:
            theta, adam = adam_step(theta, g, adam, lr)
    return theta, curve
