"""Job-shop instances, their QUBO encoding, presolve, and an exhaustive oracle.

Machines, jobs and time slots are 1-based everywhere (instance files, variable
keys, decoded schedules).  Bit positions inside a :class:`QuboProblem` are
0-based.  Variable keys are ``("x", m, j, t)`` for "job j runs on machine m at
slot t" and ``("y", m, t)`` for "a dummy job fills slot t of machine m".
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

VarKey = Tuple

DEFAULT_VAR_BUDGET = 4096
ORACLE_BUDGET = 24


class InfeasibleError(ValueError):
    """Fixed assignments contradict the scheduling constraints."""


@dataclass(frozen=True)
class PenaltyWeights:
    a1: float  # job assignment
    a2: float  # time assignment
    a3: float  # process order
    a4: float  # idle-slot contiguity

    def validate(self) -> None:
        for name in ("a1", "a2", "a3", "a4"):
            if not getattr(self, name) > 0:
                raise ValueError(f"penalty weight {name} must be > 0, got {getattr(self, name)}")

    @classmethod
    def uniform(cls, a: float) -> "PenaltyWeights":
        return cls(a, a, a, a)


@dataclass(frozen=True)
class FixedAssignment:
    """A presolve input: ``job`` (or a dummy when ``job is None``) at ``time`` on ``machine``.

    ``value=0`` records an exclusion instead of a placement.
    """

    machine: int
    job: Optional[int]
    time: int
    value: int = 1


@dataclass(frozen=True)
class JsspInstance:
    num_machines: int
    num_jobs: int
    idle_slots: Tuple[int, ...]
    due_times: Tuple[int, ...]
    processing_order: Optional[Tuple[Tuple[int, ...], ...]] = None
    fixed_assignments: Tuple[FixedAssignment, ...] = ()
    idle_candidates: Optional[Tuple[Tuple[int, ...], ...]] = None
    lateness_weight: float = 1.0
    machine_names: Optional[Tuple[str, ...]] = None
    job_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.num_machines < 1 or self.num_jobs < 1:
            raise ValueError("need at least one machine and one job")
        if len(self.idle_slots) != self.num_machines:
            raise ValueError("idle_slots needs one entry per machine")
        if any(i < 0 for i in self.idle_slots):
            raise ValueError("idle slot counts must be >= 0")
        if len(self.due_times) != self.num_jobs:
            raise ValueError("due_times needs one entry per job")
        for j, order in enumerate(self.order):
            if sorted(order) != list(range(1, self.num_machines + 1)):
                raise ValueError(f"processing order of job {j + 1} must visit every machine once")
        for m in range(1, self.num_machines + 1):
            cands = self.candidates(m)
            if len(cands) != self.idle_slots[m - 1]:
                raise ValueError(f"machine {m}: need exactly i_m={self.idle_slots[m - 1]} idle candidates")
            if len(set(cands)) != len(cands) or any(not 1 <= t <= self.horizon(m) for t in cands):
                raise ValueError(f"machine {m}: idle candidates must be distinct slots in the horizon")
        for fa in self.fixed_assignments:
            if not 1 <= fa.machine <= self.num_machines:
                raise ValueError(f"fixed assignment on unknown machine {fa.machine}")
            if not 1 <= fa.time <= self.horizon(fa.machine):
                raise ValueError(f"fixed assignment time {fa.time} outside [1, T_m]")
            if fa.job is not None and not 1 <= fa.job <= self.num_jobs:
                raise ValueError(f"fixed assignment for unknown job {fa.job}")
            if fa.job is None and fa.time not in self.candidates(fa.machine):
                raise ValueError(f"slot {fa.time} on machine {fa.machine} is not an idle candidate")
            if fa.value not in (0, 1):
                raise ValueError("fixed assignment value must be 0 or 1")

    def horizon(self, m: int) -> int:
        """T_m = J + i_m."""
        return self.num_jobs + self.idle_slots[m - 1]

    @property
    def order(self) -> Tuple[Tuple[int, ...], ...]:
        if self.processing_order is None:
            return tuple(tuple(range(1, self.num_machines + 1)) for _ in range(self.num_jobs))
        return self.processing_order

    def candidates(self, m: int) -> Tuple[int, ...]:
        """Slots of machine m that carry a dummy-job variable (default: the first i_m)."""
        if self.idle_candidates is None:
            return tuple(range(1, self.idle_slots[m - 1] + 1))
        return tuple(sorted(self.idle_candidates[m - 1]))

    def final_machine(self, j: int) -> int:
        return self.order[j - 1][-1]

    def job_name(self, j: int) -> str:
        return self.job_names[j - 1] if self.job_names else str(j)

    def machine_name(self, m: int) -> str:
        return self.machine_names[m - 1] if self.machine_names else str(m)

    def lateness(self, j: int, t: int) -> float:
        return self.lateness_weight * max(0, t - self.due_times[j - 1])

    def variables(self) -> List[VarKey]:
        """All binary variables in canonical order: x by (m, j, t), then y by (m, t)."""
        xs = [("x", m, j, t)
              for m in range(1, self.num_machines + 1)
              for j in range(1, self.num_jobs + 1)
              for t in range(1, self.horizon(m) + 1)]
        ys = [("y", m, t) for m in range(1, self.num_machines + 1) for t in self.candidates(m)]
        return xs + ys

    def default_weights(self) -> PenaltyWeights:
        worst = max(self.lateness(j, t)
                    for j in range(1, self.num_jobs + 1)
                    for t in range(1, self.horizon(self.final_machine(j)) + 1))
        return PenaltyWeights.uniform(2.0 * worst if worst > 0 else 1.0)


def instance_from_dict(data: dict) -> Tuple[JsspInstance, Optional[PenaltyWeights]]:
    fixed = []
    for fa in data.get("fixed_assignments") or []:
        if isinstance(fa, dict):
            fixed.append(FixedAssignment(fa["machine"], fa.get("job"), fa["time"], fa.get("value", 1)))
        else:
            fixed.append(FixedAssignment(*fa))

    def tup2(x):
        return None if x is None else tuple(tuple(r) for r in x)

    inst = JsspInstance(
        num_machines=data["machines"],
        num_jobs=data["jobs"],
        idle_slots=tuple(data["idle_slots"]),
        due_times=tuple(data["due_times"]),
        processing_order=tup2(data.get("processing_order")),
        fixed_assignments=tuple(fixed),
        idle_candidates=tup2(data.get("idle_candidates")),
        lateness_weight=data.get("lateness_weight", 1.0),
        machine_names=tuple(data["machine_names"]) if data.get("machine_names") else None,
        job_names=tuple(data["job_names"]) if data.get("job_names") else None,
    )
    w = data.get("weights")
    if w is None:
        weights = None
    elif isinstance(w, dict):
        weights = PenaltyWeights(w["a1"], w["a2"], w["a3"], w["a4"])
    elif isinstance(w, (int, float)):
        weights = PenaltyWeights.uniform(float(w))
    else:
        weights = PenaltyWeights(*w)
    return inst, weights


def load_instance(path) -> Tuple[JsspInstance, Optional[PenaltyWeights]]:
    """Read an instance file.  ``"d5"`` names the bundled desk instance."""
    if str(path) == "d5":
        text = resources.files("jssp_dqas.data").joinpath("d5.json").read_text()
    else:
        text = Path(path).read_text()
    return instance_from_dict(json.loads(text))


def load_d5() -> Tuple[JsspInstance, Optional[PenaltyWeights]]:
    return load_instance("d5")


# ---------------------------------------------------------------------------
# direct (term-by-term) evaluation of the scheduling objective
# ---------------------------------------------------------------------------

def _get(assign: Dict[VarKey, int], key: VarKey) -> int:
    return assign.get(key, 0)


def objective_terms(instance: JsspInstance, assign: Dict[VarKey, int]) -> Dict[str, float]:
    """Unweighted cost and penalty-family sums for a full assignment.

    Keys: ``cost``, ``job`` (sum of (g-1)^2), ``time`` (sum of (l-1)^2),
    ``order`` (sum of q) and ``idle`` (sum of r).  Missing keys count as 0.
    """
    M, J = instance.num_machines, instance.num_jobs
    cost = 0.0
    for j in range(1, J + 1):
        mf = instance.final_machine(j)
        for t in range(1, instance.horizon(mf) + 1):
            if _get(assign, ("x", mf, j, t)):
                cost += instance.lateness(j, t)
    job = 0.0
    for m in range(1, M + 1):
        for j in range(1, J + 1):
            g = sum(_get(assign, ("x", m, j, t)) for t in range(1, instance.horizon(m) + 1))
            job += (g - 1) ** 2
    time = 0.0
    for m in range(1, M + 1):
        cands = set(instance.candidates(m))
        for t in range(1, instance.horizon(m) + 1):
            l = sum(_get(assign, ("x", m, j, t)) for j in range(1, J + 1))
            if t in cands:
                l += _get(assign, ("y", m, t))
            time += (l - 1) ** 2
    order = 0.0
    for j in range(1, J + 1):
        seq = instance.order[j - 1]
        for m, m_next in zip(seq[:-1], seq[1:]):
            for t in range(1, instance.horizon(m) + 1):
                if not _get(assign, ("x", m, j, t)):
                    continue
                for t2 in range(1, min(t, instance.horizon(m_next)) + 1):
                    order += _get(assign, ("x", m_next, j, t2))
    idle = 0.0
    for m in range(2, M + 1):
        cands = instance.candidates(m)
        for c, c_next in zip(cands[:-1], cands[1:]):
            idle += _get(assign, ("y", m, c_next)) * (1 - _get(assign, ("y", m, c)))
    return {"cost": cost, "job": job, "time": time, "order": order, "idle": idle}


def direct_energy(instance: JsspInstance, weights: PenaltyWeights, assign: Dict[VarKey, int]) -> float:
    """Evaluate Q(x, y) straight from the term definitions."""
    t = objective_terms(instance, assign)
    return (t["cost"] + weights.a1 * t["job"] + weights.a2 * t["time"]
            + weights.a3 * t["order"] + weights.a4 * t["idle"])


# ---------------------------------------------------------------------------
# coefficient form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuboProblem:
    """Q(b) = offset + sum_i linear[i] b_i + sum_{i<j} quadratic[i, j] b_i b_j.

    ``fixed`` carries the variables removed by presolve so that schedules can
    be decoded back to the full variable set.
    """

    variables: Tuple[VarKey, ...]
    linear: np.ndarray
    quadratic: np.ndarray  # strictly upper triangular
    offset: float
    instance: Optional[JsspInstance] = None
    weights: Optional[PenaltyWeights] = None
    fixed: Dict[VarKey, int] = field(default_factory=dict)

    def __post_init__(self):
        self.linear.setflags(write=False)
        self.quadratic.setflags(write=False)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def var_index(self) -> Dict[VarKey, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def energy_table(self) -> np.ndarray:
        """Energies of all 2^N basis states, index = bitstring read with bit 0 leftmost."""
        cached = getattr(self, "_table", None)
        if cached is None:
            if self.num_vars > ORACLE_BUDGET:
                raise ValueError(f"{self.num_vars} variables exceed the enumeration budget {ORACLE_BUDGET}")
            cached = evaluate_batch(self, all_bitstrings(self.num_vars))
            cached.setflags(write=False)
            object.__setattr__(self, "_table", cached)
        return cached


def all_bitstrings(n: int) -> np.ndarray:
    """All 2^n bitstrings as rows, bit 0 most significant so row k spells k in binary."""
    idx = np.arange(2 ** n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


def index_to_bits(index: int, n: int) -> np.ndarray:
    return np.array([(index >> (n - 1 - k)) & 1 for k in range(n)], dtype=np.int8)


def bits_to_index(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


class _Poly:
    """Quadratic pseudo-boolean polynomial accumulator (b^2 = b)."""

    def __init__(self, n: int):
        self.lin = np.zeros(n)
        self.quad = np.zeros((n, n))
        self.const = 0.0

    def add_const(self, c: float) -> None:
        self.const += c

    def add_lin(self, i: int, c: float) -> None:
        self.lin[i] += c

    def add_quad(self, i: int, j: int, c: float) -> None:
        if i == j:
            self.lin[i] += c
        else:
            a, b = (i, j) if i < j else (j, i)
            self.quad[a, b] += c

    def add_onehot_penalty(self, idx: Sequence[int], weight: float) -> None:
        """weight * (sum_k b_k - 1)^2 with binary b."""
        self.const += weight
        for i in idx:
            # b^2 - 2b = -b
            self.lin[i] -= weight
        for a, b in itertools.combinations(idx, 2):
            self.add_quad(a, b, 2.0 * weight)


def build_qubo(instance: JsspInstance, weights: Optional[PenaltyWeights] = None,
               max_vars: int = DEFAULT_VAR_BUDGET) -> QuboProblem:
    """Expand cost plus the four weighted penalty families into coefficient form."""
    if weights is None:
        weights = instance.default_weights()
    weights.validate()
    variables = instance.variables()
    if len(variables) > max_vars:
        raise ValueError(f"instance needs {len(variables)} variables, budget is {max_vars}")
    index = {v: i for i, v in enumerate(variables)}
    M, J = instance.num_machines, instance.num_jobs
    poly = _Poly(len(variables))

    for j in range(1, J + 1):
        mf = instance.final_machine(j)
        for t in range(1, instance.horizon(mf) + 1):
            poly.add_lin(index[("x", mf, j, t)], instance.lateness(j, t))

    for m in range(1, M + 1):
        for j in range(1, J + 1):
            poly.add_onehot_penalty(
                [index[("x", m, j, t)] for t in range(1, instance.horizon(m) + 1)], weights.a1)

    for m in range(1, M + 1):
        cands = set(instance.candidates(m))
        for t in range(1, instance.horizon(m) + 1):
            idx = [index[("x", m, j, t)] for j in range(1, J + 1)]
            if t in cands:
                idx.append(index[("y", m, t)])
            poly.add_onehot_penalty(idx, weights.a2)

    for j in range(1, J + 1):
        seq = instance.order[j - 1]
        for m, m_next in zip(seq[:-1], seq[1:]):
            for t in range(1, instance.horizon(m) + 1):
                for t2 in range(1, min(t, instance.horizon(m_next)) + 1):
                    poly.add_quad(index[("x", m, j, t)], index[("x", m_next, j, t2)], weights.a3)

    for m in range(2, M + 1):
        cands = instance.candidates(m)
        for c, c_next in zip(cands[:-1], cands[1:]):
            # y_next * (1 - y_c)
            poly.add_lin(index[("y", m, c_next)], weights.a4)
            poly.add_quad(index[("y", m, c_next)], index[("y", m, c)], -weights.a4)

    return QuboProblem(tuple(variables), poly.lin, poly.quad, poly.const, instance, weights, {})


def substitute(qubo: QuboProblem, values: Dict[VarKey, int]) -> QuboProblem:
    """Fix variables to constants and drop them from the problem."""
    if not values:
        return qubo
    index = qubo.var_index
    fixed_idx = {index[k]: int(v) for k, v in values.items()}
    keep = [i for i in range(qubo.num_vars) if i not in fixed_idx]
    full = np.zeros(qubo.num_vars)
    for i, v in fixed_idx.items():
        full[i] = v
    upper = qubo.quadratic
    sym = upper + upper.T
    offset = qubo.offset + float(qubo.linear @ full) + 0.5 * float(full @ sym @ full)
    keep_arr = np.array(keep, dtype=int)
    linear = qubo.linear[keep_arr] + sym[keep_arr] @ full
    quad = upper[np.ix_(keep_arr, keep_arr)].copy()
    merged = dict(qubo.fixed)
    merged.update({k: int(v) for k, v in values.items()})
    return QuboProblem(tuple(qubo.variables[i] for i in keep), np.array(linear, dtype=float), quad,
                       offset, qubo.instance, qubo.weights, merged)


def _propagate(instance: JsspInstance) -> Dict[VarKey, int]:
    """Values implied by the fixed assignments.

    A placed job zeroes its other slots, the other jobs (and dummy) in its slot,
    and any slot on a neighbouring machine that would break its processing
    order.  A fixed dummy zeroes the real jobs in its slot.  A job left with a
    single possible slot is placed there, to a fixpoint.  Slot groups are not
    unit-propagated: a lone dummy candidate stays free for the optimizer.
    """
    M, J = instance.num_machines, instance.num_jobs
    vals: Dict[VarKey, int] = {}

    def setv(key, v):
        old = vals.get(key)
        if old is not None and old != v:
            raise InfeasibleError(f"fixed assignments force {key} to both 0 and 1")
        vals[key] = v
        return old is None

    def place(m, j, t):
        changed = setv(("x", m, j, t), 1)
        for t2 in range(1, instance.horizon(m) + 1):
            if t2 != t:
                changed |= setv(("x", m, j, t2), 0)
        for j2 in range(1, J + 1):
            if j2 != j:
                changed |= setv(("x", m, j2, t), 0)
        if t in instance.candidates(m):
            changed |= setv(("y", m, t), 0)
        seq = instance.order[j - 1]
        pos = seq.index(m)
        if pos + 1 < len(seq):
            nxt = seq[pos + 1]
            for t2 in range(1, min(t, instance.horizon(nxt)) + 1):
                changed |= setv(("x", nxt, j, t2), 0)
        if pos > 0:
            prv = seq[pos - 1]
            for t2 in range(t, instance.horizon(prv) + 1):
                changed |= setv(("x", prv, j, t2), 0)
        return changed

    for fa in instance.fixed_assignments:
        if fa.job is None:
            setv(("y", fa.machine, fa.time), fa.value)
            if fa.value == 1:
                for j in range(1, J + 1):
                    setv(("x", fa.machine, j, fa.time), 0)
        else:
            setv(("x", fa.machine, fa.job, fa.time), fa.value)

    changed = True
    while changed:
        changed = False
        for key, v in list(vals.items()):
            if key[0] == "x" and v == 1:
                changed |= place(*key[1:])
        for m in range(1, M + 1):
            for j in range(1, J + 1):
                slots = [t for t in range(1, instance.horizon(m) + 1)
                         if vals.get(("x", m, j, t)) != 0]
                if not slots:
                    raise InfeasibleError(f"job {j} has no feasible slot on machine {m}")
                ones = [t for t in slots if vals.get(("x", m, j, t)) == 1]
                if len(ones) > 1:
                    raise InfeasibleError(f"job {j} placed twice on machine {m}")
                if len(slots) == 1 and not ones:
                    changed |= place(m, j, slots[0])
        for m in range(1, M + 1):
            for t in range(1, instance.horizon(m) + 1):
                keys = [("x", m, j, t) for j in range(1, J + 1)]
                if t in instance.candidates(m):
                    keys.append(("y", m, t))
                if sum(vals.get(k) == 1 for k in keys) > 1:
                    raise InfeasibleError(f"slot {t} on machine {m} holds two jobs")
                if all(vals.get(k) == 0 for k in keys):
                    raise InfeasibleError(f"slot {t} on machine {m} can hold nothing")
    return vals


def presolve(instance: JsspInstance, qubo: QuboProblem) -> QuboProblem:
    """Substitute out every variable whose value the fixed assignments determine."""
    if not instance.fixed_assignments:
        return qubo
    vals = _propagate(instance)
    present = set(qubo.variables)
    return substitute(qubo, {k: v for k, v in vals.items() if k in present})


def compile_instance(instance: JsspInstance, weights: Optional[PenaltyWeights] = None) -> QuboProblem:
    """build_qubo followed by presolve."""
    return presolve(instance, build_qubo(instance, weights))


def _check_bits(qubo: QuboProblem, bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.int64)
    if arr.shape[-1] != qubo.num_vars:
        raise ValueError(f"bitstring has length {arr.shape[-1]}, problem has {qubo.num_vars} variables")
    return arr


def evaluate_energy(qubo: QuboProblem, bits) -> float:
    b = _check_bits(qubo, bits).astype(float)
    return float(qubo.offset + qubo.linear @ b + b @ qubo.quadratic @ b)


def evaluate_batch(qubo: QuboProblem, bits) -> np.ndarray:
    """Energies for a (K, N) array of bitstrings."""
    b = _check_bits(qubo, bits).astype(float)
    return qubo.offset + b @ qubo.linear + np.einsum("ki,ij,kj->k", b, qubo.quadratic, b)


@dataclass(frozen=True)
class EnergyBounds:
    e_min: float
    e_max: float
    e_target: float
    argmin: Tuple[int, ...]
    argmax: Tuple[int, ...] = ()


def brute_force_oracle(qubo: QuboProblem, budget: int = ORACLE_BUDGET) -> EnergyBounds:
    """Enumerate all 2^N bitstrings.  Ties resolve to the smallest bitstring index."""
    if qubo.num_vars > budget:
        raise ValueError(f"{qubo.num_vars} variables exceed the enumeration budget {budget}")
    table = qubo.energy_table()
    lo, hi = int(np.argmin(table)), int(np.argmax(table))
    n = qubo.num_vars
    return EnergyBounds(float(table[lo]), float(table[hi]), float(table[lo]),
                        tuple(int(b) for b in index_to_bits(lo, n)),
                        tuple(int(b) for b in index_to_bits(hi, n)))


def scale_energy(E, bounds: EnergyBounds):
    """Map energies linearly so that E_min -> 0 and E_max -> 1."""
    span = bounds.e_max - bounds.e_min
    if not span > 0:
        raise ValueError("degenerate energy bounds: e_max == e_min")
    out = (np.asarray(E, dtype=float) - bounds.e_min) / span
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Schedule:
    """``assignment[(m, t)]`` is a list of job ids placed there (``None`` marks a dummy)."""

    assignment: Dict[Tuple[int, int], Tuple[Optional[int], ...]]
    feasible: Dict[str, bool]
    cost: float

    @property
    def is_feasible(self) -> bool:
        return all(self.feasible.values())

    def slot_of(self, machine: int, job: int) -> Optional[int]:
        slots = [t for (m, t), jobs in self.assignment.items() if m == machine and job in jobs]
        return slots[0] if len(slots) == 1 else None

    def describe(self, instance: JsspInstance) -> str:
        lines = []
        for m in range(1, instance.num_machines + 1):
            cells = []
            for t in range(1, instance.horizon(m) + 1):
                jobs = self.assignment.get((m, t), ())
                if not jobs:
                    cells.append(".")
                else:
                    cells.append("+".join("idle" if j is None else instance.job_name(j) for j in jobs))
            lines.append(f"machine {instance.machine_name(m)}: " + " | ".join(cells))
        return "\n".join(lines)


def full_assignment(qubo: QuboProblem, bits) -> Dict[VarKey, int]:
    b = _check_bits(qubo, bits)
    assign = dict(qubo.fixed)
    assign.update({k: int(v) for k, v in zip(qubo.variables, b)})
    return assign


def decode_schedule(qubo: QuboProblem, bits) -> Schedule:
    instance = qubo.instance
    if instance is None:
        raise ValueError("QUBO carries no instance to decode against")
    assign = full_assignment(qubo, bits)
    table: Dict[Tuple[int, int], List[Optional[int]]] = {}
    for key, v in assign.items():
        if not v:
            continue
        if key[0] == "x":
            _, m, j, t = key
            table.setdefault((m, t), []).append(j)
        else:
            _, m, t = key
            table.setdefault((m, t), []).append(None)
    terms = objective_terms(instance, assign)
    feasible = {fam: terms[fam] == 0 for fam in ("job", "time", "order", "idle")}
    return Schedule({k: tuple(sorted(v, key=lambda j: (j is None, j or 0))) for k, v in table.items()},
                    feasible, terms["cost"])


def encode_schedule(qubo: QuboProblem, schedule: Schedule) -> np.ndarray:
    bits = np.zeros(qubo.num_vars, dtype=np.int8)
    index = qubo.var_index
    for (m, t), jobs in schedule.assignment.items():
        for j in jobs:
            key = ("y", m, t) if j is None else ("x", m, j, t)
            if key in index:
                bits[index[key]] = 1
    return bits


# ---------------------------------------------------------------------------
# text export
# ---------------------------------------------------------------------------

def export_qubo(qubo: QuboProblem) -> str:
    """N, offset, then ``i j coeff`` lines (i == j for linear terms) in (i, j) order."""
    lines = [str(qubo.num_vars), repr(float(qubo.offset))]
    n = qubo.num_vars
    for i in range(n):
        if qubo.linear[i] != 0:
            lines.append(f"{i} {i} {float(qubo.linear[i])!r}")
        for j in range(i + 1, n):
            if qubo.quadratic[i, j] != 0:
                lines.append(f"{i} {j} {float(qubo.quadratic[i, j])!r}")
    return "\n".join(lines) + "\n"


def import_qubo(text: str) -> QuboProblem:
    rows = [r for r in text.splitlines() if r.strip()]
    n = int(rows[0])
    offset = float(rows[1])
    lin, quad = np.zeros(n), np.zeros((n, n))
    for r in rows[2:]:
        i, j, c = r.split()
        i, j = int(i), int(j)
        if i == j:
            lin[i] = float(c)
        else:
            quad[min(i, j), max(i, j)] = float(c)
    return QuboProblem(tuple(("b", k) for k in range(n)), lin, quad, offset)


def iter_feasible(qubo: QuboProblem) -> Iterable[np.ndarray]:
    for bits in all_bitstrings(qubo.num_vars):
        if decode_schedule(qubo, bits).is_feasible:
            yield bits
