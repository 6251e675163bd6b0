"""Operation pools, candidate expansion and circuit assembly."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .simulator import GATE_KINDS, N_PARAMS, TWO_QUBIT, GateInstr

ROTATIONS = ("rx", "ry", "rz")


@dataclass(frozen=True)
class OpCandidate:
    gate_kind: str
    working_range: Tuple[int, ...]

    def __post_init__(self):
        if self.gate_kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.gate_kind!r}")
        if not self.working_range or len(set(self.working_range)) != len(self.working_range):
            raise ValueError("working range must be non-empty with distinct qubits")

    def label(self) -> str:
        return f"{self.gate_kind}{list(self.working_range)}"

    def to_dict(self) -> dict:
        return {"gate_kind": self.gate_kind, "working_range": list(self.working_range)}


@dataclass(frozen=True)
class OperationPool:
    name: str
    candidates: Tuple[OpCandidate, ...]

    def __post_init__(self):
        if len(self.candidates) < 2:
            raise ValueError("a pool needs at least two candidates")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError("pool candidates must be distinct")

    @property
    def size(self) -> int:
        return len(self.candidates)

    def __len__(self):
        return len(self.candidates)

    def __getitem__(self, i) -> OpCandidate:
        return self.candidates[i]


@dataclass(frozen=True)
class PlaceholderCircuit:
    n: int
    encoding: Tuple[GateInstr, ...]
    p: int
    block_count: int = 1

    def __post_init__(self):
        if self.p < 1 or self.block_count < 1:
            raise ValueError("need at least one placeholder and one block")
        if any(g.trainable for g in self.encoding):
            raise ValueError("encoding gates must not be trainable")

    @property
    def slots(self) -> int:
        return self.p * self.block_count


def encoding_block(n: int) -> Tuple[GateInstr, ...]:
    """rx(pi) on every qubit: |0...0> -> |1...1> up to phase."""
    import math
    return tuple(GateInstr("rx", (q,), (math.pi,)) for q in range(n))


def make_placeholder_circuit(n: int = 5, p: int = 4, block_count: int = 1) -> PlaceholderCircuit:
    return PlaceholderCircuit(n, encoding_block(n), p, block_count)


def make_pool(name: str, n: int = 5) -> OperationPool:
    full = tuple(range(n))
    head, tail = tuple(range(n - 1)), tuple(range(1, n))
    rot = [OpCandidate(k, r) for k in ("ry", "rz") for r in (full, head, tail)]
    if name == "op1":
        cands = rot + [OpCandidate("cz", head), OpCandidate("cnot", head), OpCandidate("identity", full)]
    elif name == "op2":
        cands = rot + [OpCandidate("cnot", head), OpCandidate("identity", full)]
    else:
        raise ValueError(f"unknown pool {name!r} (expected op1 or op2)")
    return OperationPool(name, tuple(cands))


def _pairs(cand: OpCandidate, n: int) -> List[Tuple[int, int]]:
    r = cand.working_range
    pairs = list(zip(r[:-1], r[1:]))
    if len(r) == n and n > 2:
        pairs.append((r[-1], r[0]))
    return pairs


def expand_candidate(cand: OpCandidate, n: int, first_slot: int = 0) -> List[GateInstr]:
    """Gate layer for one candidate; trainable slots numbered from ``first_slot``."""
    if any(not 0 <= q < n for q in cand.working_range):
        raise ValueError(f"working range {cand.working_range} exceeds {n} qubits")
    kind = cand.gate_kind
    if kind == "identity":
        return []
    if kind in TWO_QUBIT:
        if len(cand.working_range) < 2:
            raise ValueError(f"{kind} needs a working range of at least two qubits")
        return [GateInstr(kind, pair) for pair in _pairs(cand, n)]
    k = N_PARAMS[kind]
    gates = []
    slot = first_slot
    for q in cand.working_range:
        gates.append(GateInstr(kind, (q,), param_slots=tuple(range(slot, slot + k))))
        slot += k
    return gates


def candidate_param_count(cand: OpCandidate) -> int:
    return N_PARAMS[cand.gate_kind] * len(cand.working_range)


def assemble_circuit(pc: PlaceholderCircuit, pool: OperationPool,
                     arch: Sequence[int]) -> Tuple[List[GateInstr], int]:
    """Encoding followed by each placeholder's expansion; slots numbered from 0."""
    if len(arch) != pc.slots:
        raise ValueError(f"architecture has {len(arch)} choices, circuit has {pc.slots} placeholders")
    gates = list(pc.encoding)
    slot = 0
    for choice in arch:
        if not 0 <= choice < pool.size:
            raise ValueError(f"choice {choice} outside pool of size {pool.size}")
        layer = expand_candidate(pool[choice], pc.n, slot)
        slot += candidate_param_count(pool[choice])
        gates.extend(layer)
    return gates, slot


def bank_size(pc: PlaceholderCircuit) -> int:
    """Shared weight bank: 3n slots per placeholder."""
    return 3 * pc.n * pc.slots


def bank_slot(placeholder: int, kind: str, qubit: int, k: int, n: int) -> int:
    """Fixed bank position read by ``kind`` on ``qubit`` (parameter ``k``) in a placeholder.

    rx, ry and rz read the first, second and third n-slice; u3 reads the three
    slices at its qubit, in (theta, phi, lambda) order.
    """
    base = 3 * n * placeholder
    if kind == "u3":
        return base + k * n + qubit
    return base + ROTATIONS.index(kind) * n + qubit


def assemble_shared(pc: PlaceholderCircuit, pool: OperationPool,
                    arch: Sequence[int]) -> List[GateInstr]:
    """Like :func:`assemble_circuit` but parameter slots point into the shared bank."""
    gates, _ = assemble_circuit(pc, pool, arch)
    out = list(gates[:len(pc.encoding)])
    for ph, choice in enumerate(arch):
        for g in expand_candidate(pool[choice], pc.n):
            if g.trainable:
                slots = tuple(bank_slot(ph, g.kind, g.targets[0], k, pc.n) for k in range(len(g.param_slots)))
                g = GateInstr(g.kind, g.targets, param_slots=slots)
            out.append(g)
    return out


def bank_to_local(pc: PlaceholderCircuit, pool: OperationPool, arch: Sequence[int], bank) -> List[float]:
    """Extract the contiguous parameter vector of ``arch`` from a bank."""
    shared = [g for g in assemble_shared(pc, pool, arch) if g.trainable]
    return [float(bank[s]) for g in shared for s in g.param_slots]


def gate_count(gates: Sequence[GateInstr]) -> int:
    return sum(1 for g in gates if g.kind != "identity")


def baseline_circuit(n: int = 5, layers: int = 2) -> Tuple[List[GateInstr], int]:
    """Hand-designed comparator: encoding, then per layer ry on every qubit and an open cnot chain.

    With n = 5 and two layers this is 5 + 2 * (5 + 4) = 23 gates and 10 parameters.
    The original diagram is not recoverable from text; this layout is a reconstruction.
    """
    gates = list(encoding_block(n))
    slot = 0
    for _ in range(layers):
        for q in range(n):
            gates.append(GateInstr("ry", (q,), param_slots=(slot,)))
            slot += 1
        for q in range(n - 1):
            gates.append(GateInstr("cnot", (q, q + 1)))
    return gates, slot


def arch_to_json(pool: OperationPool, arch: Sequence[int]) -> List[dict]:
    return [pool[c].to_dict() for c in arch]


def arch_from_json(pool: OperationPool, items: Sequence[dict]) -> List[int]:
    lookup = {c: i for i, c in enumerate(pool.candidates)}
    arch = []
    for it in items:
        cand = OpCandidate(it["gate_kind"], tuple(it["working_range"]))
        if cand not in lookup:
            raise ValueError(f"candidate {cand.label()} is not in pool {pool.name}")
        arch.append(lookup[cand])
    return arch


def dumps_arch(pool: OperationPool, arch: Sequence[int]) -> str:
    return json.dumps(arch_to_json(pool, arch))


def draw(gates: Sequence[GateInstr], n: int, theta: Optional[Sequence[float]] = None) -> str:
    """Plain-text circuit diagram, one column per gate."""
    rows = [[] for _ in range(n)]
    for g in gates:
        if g.kind == "identity":
            continue
        if g.kind in TWO_QUBIT:
            a, b = g.targets
            cells = {a: "@", b: "X" if g.kind == "cnot" else "@"}
            lo, hi = min(a, b), max(a, b)
            for q in range(n):
                if q in cells:
                    rows[q].append(cells[q])
                elif lo < q < hi:
                    rows[q].append("|")
                else:
                    rows[q].append("-")
        else:
            if g.trainable and theta is not None:
                label = f"{g.kind.upper()}({','.join(f'{a:.2f}' for a in g.angles(theta))})"
            elif g.trainable:
                label = f"{g.kind.upper()}(t{','.join(map(str, g.param_slots))})"
            else:
                label = f"{g.kind.upper()}({','.join(f'{a:.2f}' for a in g.params)})"
            for q in range(n):
                rows[q].append(label if q == g.targets[0] else "-")
    # align columns
    ncol = len(rows[0]) if rows else 0
    widths = [max(len(rows[q][c]) for q in range(n)) for c in range(ncol)]
    lines = []
    for q in range(n):
        cells = [rows[q][c].center(widths[c], "-") for c in range(ncol)]
        lines.append(f"q{q}: -" + "-".join(cells) + "-")
    return "\n".join(lines)
