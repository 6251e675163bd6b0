"""Dense statevector simulation with Pauli-trajectory noise.

States are complex arrays of shape ``(2**n,)`` or batched ``(B, 2**n)``.
Qubit 0 is the most significant bit of the basis index, so a sampled bitstring
reads left to right as qubit 0, 1, ..., n-1.  Rotations follow
``R_P(phi) = exp(-i phi P / 2)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

GATE_KINDS = ("rx", "ry", "rz", "u3", "cnot", "cz", "identity")
TWO_QUBIT = ("cnot", "cz")
N_PARAMS = {"rx": 1, "ry": 1, "rz": 1, "u3": 3, "cnot": 0, "cz": 0, "identity": 0}

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)


@dataclass(frozen=True)
class GateInstr:
    """One gate.  ``params`` holds fixed angles; ``param_slots`` indexes theta instead."""

    kind: str
    targets: Tuple[int, ...]
    params: Tuple[float, ...] = ()
    param_slots: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind in TWO_QUBIT:
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise ValueError(f"{self.kind} needs two distinct targets")
        elif self.kind != "identity" and len(self.targets) != 1:
            raise ValueError(f"{self.kind} acts on exactly one qubit")
        k = N_PARAMS[self.kind]
        if self.param_slots:
            if len(self.param_slots) != k:
                raise ValueError(f"{self.kind} takes {k} parameter slots")
        elif len(self.params) != k:
            raise ValueError(f"{self.kind} takes {k} parameters")

    @property
    def trainable(self) -> bool:
        return bool(self.param_slots)

    def angles(self, theta: Optional[Sequence[float]]) -> Tuple[float, ...]:
        if not self.param_slots:
            return self.params
        if theta is None:
            raise ValueError(f"gate {self.kind} on {self.targets} needs theta")
        try:
            return tuple(float(theta[s]) for s in self.param_slots)
        except IndexError:
            raise ValueError(f"parameter slot out of range in {self.kind} gate: {self.param_slots}") from None


@dataclass(frozen=True)
class NoiseSpec:
    kind: str  # bitflip | phaseflip | depolarizing
    p: float
    placement: str = "both"  # after_encoding | before_measurement | both

    def __post_init__(self):
        if self.kind not in ("bitflip", "phaseflip", "depolarizing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")
        if self.placement not in ("after_encoding", "before_measurement", "both"):
            raise ValueError(f"unknown noise placement {self.placement!r}")

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        """``kind:prob[:placement]``, e.g. ``bitflip:0.2:both``."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad noise spec {text!r}, expected kind:prob[:placement]")
        return cls(parts[0], float(parts[1]), parts[2] if len(parts) == 3 else "both")

    @property
    def early(self) -> bool:
        return self.p > 0 and self.placement in ("after_encoding", "both")

    @property
    def late(self) -> bool:
        return self.p > 0 and self.placement in ("before_measurement", "both")


def rx(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(phi: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    """Equals exp(i(phi+lam)/2) rz(phi) ry(theta) rz(lam)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -np.exp(1j * lam) * s],
                     [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]], dtype=complex)


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def gate_matrix(kind: str, angles: Sequence[float] = ()) -> np.ndarray:
    """2x2 or 4x4 unitary; for two-qubit gates the first target is the high bit."""
    if kind == "rx":
        return rx(*angles)
    if kind == "ry":
        return ry(*angles)
    if kind == "rz":
        return rz(*angles)
    if kind == "u3":
        return u3(*angles)
    if kind == "cnot":
        return CNOT
    if kind == "cz":
        return CZ
    if kind == "identity":
        return I2
    raise ValueError(f"unknown gate kind {kind!r}")


def zero_state(n: int, batch: Optional[int] = None) -> np.ndarray:
    shape = (2 ** n,) if batch is None else (batch, 2 ** n)
    psi = np.zeros(shape, dtype=complex)
    psi[..., 0] = 1.0
    return psi


def basis_state(n: int, bits: Sequence[int]) -> np.ndarray:
    psi = np.zeros(2 ** n, dtype=complex)
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    psi[idx] = 1.0
    return psi


def num_qubits(state: np.ndarray) -> int:
    n = int(state.shape[-1]).bit_length() - 1
    if 2 ** n != state.shape[-1]:
        raise ValueError("state length is not a power of two")
    return n


def _as_tensor(state: np.ndarray, n: int) -> np.ndarray:
    return state.reshape(state.shape[:-1] + (2,) * n)


def apply_1q(state: np.ndarray, matrix: np.ndarray, q: int, n: int) -> np.ndarray:
    lead = state.ndim - 1
    psi = _as_tensor(state, n)
    axis = lead + q
    out = np.tensordot(matrix, psi, axes=([1], [axis]))
    out = np.moveaxis(out, 0, axis)
    return out.reshape(state.shape)


def apply_gate(state: np.ndarray, gate: GateInstr, theta: Optional[Sequence[float]] = None) -> np.ndarray:
    """Return ``U state`` for one gate; ``state`` may carry a leading batch axis."""
    n = num_qubits(state)
    if any(not 0 <= q < n for q in gate.targets):
        raise ValueError(f"gate target {gate.targets} out of range for {n} qubits")
    if gate.kind == "identity":
        return state
    if gate.kind in TWO_QUBIT:
        a, b = gate.targets
        lead = state.ndim - 1
        psi = _as_tensor(state, n).copy()
        sel = [slice(None)] * psi.ndim
        if gate.kind == "cz":
            sel[lead + a], sel[lead + b] = 1, 1
            psi[tuple(sel)] *= -1
        else:
            sel[lead + a] = 1
            sub = psi[tuple(sel)]
            # target axis index shifts down by one if it came after the control
            t_axis = lead + b - (1 if b > a else 0)
            psi[tuple(sel)] = np.flip(sub, axis=t_axis)
        return psi.reshape(state.shape)
    return apply_1q(state, gate_matrix(gate.kind, gate.angles(theta)), gate.targets[0], n)


def run_circuit(gates: Sequence[GateInstr], theta: Optional[Sequence[float]], n: int,
                initial: Optional[np.ndarray] = None) -> np.ndarray:
    psi = zero_state(n) if initial is None else initial
    for g in gates:
        psi = apply_gate(psi, g, theta)
    return psi


def probabilities(state: np.ndarray) -> np.ndarray:
    p = np.abs(state) ** 2
    return p / p.sum(axis=-1, keepdims=True)


def sample_indices(state: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    if shots < 1:
        raise ValueError("need at least one shot")
    p = probabilities(state)
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, rng.random(shots), side="right")


def sample_bitstrings(state: np.ndarray, shots: int, rng_seed) -> np.ndarray:
    """``shots`` draws from |amplitude|^2 as a (shots, n) 0/1 array, qubit 0 leftmost."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    n = num_qubits(state)
    idx = sample_indices(state, shots, rng)
    shifts = np.arange(n - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.int8)


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

def draw_paulis(spec: NoiseSpec, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Pauli labels (0=I, 1=X, 2=Y, 3=Z) of shape (size, n) for one placement point."""
    hit = rng.random((size, n)) < spec.p
    if spec.kind == "bitflip":
        which = np.ones((size, n), dtype=np.int8)
    elif spec.kind == "phaseflip":
        which = np.full((size, n), 3, dtype=np.int8)
    else:
        which = rng.integers(1, 4, size=(size, n)).astype(np.int8)
    return np.where(hit, which, 0).astype(np.int8)


def apply_paulis(state: np.ndarray, labels: Sequence[int]) -> np.ndarray:
    n = num_qubits(state)
    for q, lab in enumerate(labels):
        if lab:
            state = apply_1q(state, PAULIS[lab], q, n)
    return state


def apply_pauli_batch(state: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Apply K Pauli strings to one state at once; returns (K, 2^n).

    A Pauli string permutes amplitudes by its X/Y mask and multiplies in a
    phase: (-1) per Z/Y qubit set in the source index, and a factor i per Y.
    """
    n = num_qubits(state)
    labels = np.asarray(labels)
    weights = 1 << np.arange(n - 1, -1, -1)
    xmask = ((labels == 1) | (labels == 2)).astype(np.int64) @ weights
    zmask = ((labels == 3) | (labels == 2)).astype(np.int64) @ weights
    ny = (labels == 2).sum(axis=1)
    out_idx = np.arange(2 ** n)
    src = out_idx[None, :] ^ xmask[:, None]
    hits = src & zmask[:, None]
    parity = np.zeros_like(hits)
    for q in range(n):
        parity ^= (hits >> q) & 1
    phase = (1j ** ny)[:, None] * (1 - 2 * parity)
    return state[src] * phase


def apply_noise(state: np.ndarray, spec: NoiseSpec, rng_seed) -> np.ndarray:
    """One trajectory of the Pauli channel at a single placement point."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    if spec.p == 0:
        return state
    return apply_paulis(state, draw_paulis(spec, num_qubits(state), 1, rng)[0])


def run_trajectory(gates: Sequence[GateInstr], theta, n: int, spec: Optional[NoiseSpec],
                   rng_seed, encoding_len: int = 0) -> np.ndarray:
    """Run one noisy trajectory; noise follows gate ``encoding_len - 1`` and precedes measurement."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    psi = run_circuit(gates[:encoding_len], theta, n)
    if spec is not None and spec.early:
        psi = apply_noise(psi, spec, rng)
    psi = run_circuit(gates[encoding_len:], theta, n, initial=psi)
    if spec is not None and spec.late:
        psi = apply_noise(psi, spec, rng)
    return psi


def _flip_mask(labels: np.ndarray) -> np.ndarray:
    """Basis-index XOR mask of X/Y labels; Z and I leave outcomes unchanged."""
    n = labels.shape[-1]
    weights = 1 << np.arange(n - 1, -1, -1)
    return ((labels == 1) | (labels == 2)).astype(np.int64) @ weights


def sample_noisy_indices(gates: Sequence[GateInstr], theta, n: int, spec: Optional[NoiseSpec],
                         shots: int, rng: np.random.Generator, encoding_len: int = 0) -> np.ndarray:
    """One independent trajectory per shot, sampled as basis indices.

    Shots sharing the same early Pauli string share one simulation.  Late
    Paulis act right before measurement, so they only XOR the outcome.
    """
    if spec is None or spec.p == 0:
        return sample_indices(run_circuit(gates, theta, n), shots, rng)
    if spec.early:
        early = draw_paulis(spec, n, shots, rng)
        codes = early.astype(np.int64) @ (4 ** np.arange(n, dtype=np.int64))
        _, first, inverse = np.unique(codes, return_index=True, return_inverse=True)
        keys = early[first]
        inverse = np.asarray(inverse).reshape(-1)
        head = run_circuit(gates[:encoding_len], theta, n)
        batch = apply_pauli_batch(head, keys)
        batch = run_circuit(gates[encoding_len:], theta, n, initial=batch)
        probs = probabilities(batch)
        cdf = np.cumsum(probs, axis=1)
        cdf[:, -1] = 1.0
        u = rng.random(shots)
        idx = (cdf[inverse] <= u[:, None]).sum(axis=1).astype(np.int64)
    else:
        idx = sample_indices(run_circuit(gates, theta, n), shots, rng).astype(np.int64)
    if spec.late:
        idx = idx ^ _flip_mask(draw_paulis(spec, n, shots, rng))
    return idx


def pauli_channel_probs(spec: NoiseSpec) -> List[Tuple[float, np.ndarray]]:
    """Single-qubit Kraus weights of the channel as (probability, Pauli) pairs."""
    if spec.kind == "bitflip":
        return [(1 - spec.p, I2), (spec.p, X)]
    if spec.kind == "phaseflip":
        return [(1 - spec.p, I2), (spec.p, Z)]
    return [(1 - spec.p, I2), (spec.p / 3, X), (spec.p / 3, Y), (spec.p / 3, Z)]


def dump_amplitudes(state: np.ndarray, path) -> None:
    """Debug CSV: index, re, im."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, a in enumerate(np.asarray(state).reshape(-1)):
            w.writerow([i, repr(float(a.real)), repr(float(a.imag))])
