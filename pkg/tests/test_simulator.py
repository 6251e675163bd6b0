import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jssp_dqas.simulator import (
    CNOT, CZ, GateInstr, NoiseSpec, X, apply_gate, apply_noise, basis_state, dump_amplitudes,
    gate_matrix, probabilities, run_circuit, run_trajectory, sample_bitstrings,
    sample_noisy_indices, zero_state,
)

from _oracles import I2, density_oracle, dense, random_circuit_invariants, random_gate, \
    trajectory_within_3sigma


def test_rx_pi_flips():
    psi = apply_gate(zero_state(1), GateInstr("rx", (0,), (math.pi,)))
    assert abs(psi[1]) == pytest.approx(1.0)


def test_identity_noop():
    psi = basis_state(2, [0, 1])
    assert np.array_equal(apply_gate(psi, GateInstr("identity", (0,))), psi)


def test_cnot_truth_table():
    for bits, out in [([0, 0], [0, 0]), ([0, 1], [0, 1]), ([1, 0], [1, 1]), ([1, 1], [1, 0])]:
        psi = apply_gate(basis_state(2, bits), GateInstr("cnot", (0, 1)))
        np.testing.assert_allclose(psi, basis_state(2, out))
    assert np.allclose(dense(GateInstr("cnot", (0, 1)), 2), CNOT)
    assert np.allclose(dense(GateInstr("cz", (0, 1)), 2), CZ)


def test_reversed_cnot():
    psi = apply_gate(basis_state(3, [0, 0, 1]), GateInstr("cnot", (2, 0)))
    np.testing.assert_allclose(psi, basis_state(3, [1, 0, 1]))


def test_empty_circuit():
    np.testing.assert_array_equal(run_circuit([], None, 3), zero_state(3))


def test_encoding_block_gives_all_ones():
    gates = [GateInstr("rx", (q,), (math.pi,)) for q in range(5)]
    p = probabilities(run_circuit(gates, None, 5))
    assert p[31] == pytest.approx(1.0)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_rz_group(a, b):
    np.testing.assert_allclose(gate_matrix("rz", [a]) @ gate_matrix("rz", [b]), gate_matrix("rz", [a + b]),
                               atol=1e-12)


def test_u3_matches_qiskit_convention():
    # u3(pi/2, 0, pi) is the Hadamard gate
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    np.testing.assert_allclose(gate_matrix("u3", [math.pi / 2, 0, math.pi]), H, atol=1e-12)


def test_unitarity_and_norm_10k_circuits():
    assert random_circuit_invariants(10_000, seed=0)
    rng = np.random.default_rng(0)
    for kind, k in (("rx", 1), ("ry", 1), ("rz", 1), ("u3", 3)):
        U = gate_matrix(kind, rng.uniform(-4, 4, k))
        np.testing.assert_allclose(U.conj().T @ U, I2, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_tensor_path_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    gates = [random_gate(rng, n) for _ in range(6)]
    U = reduce(lambda acc, g: dense(g, n) @ acc, gates, np.eye(2 ** n))
    psi0 = basis_state(n, rng.integers(0, 2, n))
    np.testing.assert_allclose(run_circuit(gates, None, n, initial=psi0), U @ psi0, atol=1e-10)


def test_batched_state():
    rng = np.random.default_rng(1)
    batch = np.stack([basis_state(3, b) for b in ([0, 0, 0], [1, 0, 1])])
    gates = [random_gate(rng, 3) for _ in range(8)]
    out = run_circuit(gates, None, 3, initial=batch)
    for k in range(2):
        np.testing.assert_allclose(out[k], run_circuit(gates, None, 3, initial=batch[k]))


def test_trainable_slots():
    g = GateInstr("ry", (0,), param_slots=(1,))
    psi = apply_gate(zero_state(1), g, [0.0, math.pi])
    assert abs(psi[1]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        apply_gate(zero_state(1), g, None)
    with pytest.raises(ValueError):
        apply_gate(zero_state(1), g, [0.0])


def test_gate_validation():
    with pytest.raises(ValueError):
        GateInstr("cnot", (1, 1))
    with pytest.raises(ValueError):
        GateInstr("swap", (0, 1))
    with pytest.raises(ValueError):
        apply_gate(zero_state(2), GateInstr("rx", (2,), (0.1,)))


def test_sampling_basis_state():
    s = sample_bitstrings(basis_state(5, [1] * 5), 100, 3)
    assert (s == 1).all()


def test_sampling_uniform_frequency():
    psi = apply_gate(zero_state(1), GateInstr("u3", (0,), (math.pi / 2, 0, math.pi)))
    s = sample_bitstrings(psi, 100_000, 11)
    assert abs(s.mean() - 0.5) < 0.01


def test_sampling_deterministic():
    psi = run_circuit([GateInstr("ry", (q,), (0.7 * (q + 1),)) for q in range(3)], None, 3)
    assert np.array_equal(sample_bitstrings(psi, 50, 5), sample_bitstrings(psi, 50, 5))


def test_noise_parse():
    assert NoiseSpec.parse("bitflip:0.2:both") == NoiseSpec("bitflip", 0.2, "both")
    assert NoiseSpec.parse("depolarizing:0.1").placement == "both"
    for bad in ("bitflip", "x:0.1", "bitflip:2", "bitflip:0.1:middle"):
        with pytest.raises(ValueError):
            NoiseSpec.parse(bad)


def test_zero_noise_is_noiseless():
    rng = np.random.default_rng(0)
    gates = [random_gate(rng, 3) for _ in range(6)]
    spec = NoiseSpec("depolarizing", 0.0)
    a = sample_noisy_indices(gates, None, 3, spec, 200, np.random.default_rng(9), 2)
    b = sample_noisy_indices(gates, None, 3, None, 200, np.random.default_rng(9), 2)
    np.testing.assert_array_equal(a, b)
    psi = run_circuit(gates, None, 3)
    np.testing.assert_array_equal(apply_noise(psi, spec, 0), psi)


def test_certain_bitflip_before_measurement():
    spec = NoiseSpec("bitflip", 1.0, "before_measurement")
    psi = run_trajectory([], None, 2, spec, 0)
    np.testing.assert_allclose(np.abs(psi), basis_state(2, [1, 1]))
    idx = sample_noisy_indices([], None, 2, spec, 10, np.random.default_rng(0))
    assert (idx == 3).all()


def test_bitflip_rate():
    spec = NoiseSpec("bitflip", 0.2, "before_measurement")
    idx = sample_noisy_indices([], None, 1, spec, 100_000, np.random.default_rng(4))
    assert abs(idx.mean() - 0.2) < 0.01


@pytest.mark.parametrize("kind", ["bitflip", "phaseflip", "depolarizing"])
@pytest.mark.parametrize("placement", ["after_encoding", "before_measurement", "both"])
def test_trajectories_match_density_matrix(kind, placement):
    assert trajectory_within_3sigma(NoiseSpec(kind, 0.2, placement), seed=17)


def test_single_trajectory_matches_statistics():
    gates = [GateInstr("ry", (0,), (0.8,)), GateInstr("cnot", (0, 1))]
    spec = NoiseSpec("depolarizing", 0.2, "both")
    exact = density_oracle(gates, 2, spec, 1)
    acc = np.zeros(4)
    rng = np.random.default_rng(2)
    for _ in range(4000):
        acc += probabilities(run_trajectory(gates, None, 2, spec, rng, 1))
    np.testing.assert_allclose(acc / 4000, exact, atol=0.02)


def test_dump_amplitudes(tmp_path):
    path = tmp_path / "amps.csv"
    dump_amplitudes(basis_state(1, [1]), path)
    assert path.read_text().splitlines() == ["index,re,im", "0,0.0,0.0", "1,1.0,0.0"]


def test_x_is_pauli():
    np.testing.assert_array_equal(X @ X, I2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_pauli_batch_matches_sequential(seed):
    from jssp_dqas.simulator import apply_pauli_batch, apply_paulis
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    labels = rng.integers(0, 4, size=(6, n))
    batch = apply_pauli_batch(psi, labels)
    for k in range(6):
        np.testing.assert_allclose(batch[k], apply_paulis(psi, labels[k]), atol=1e-12)
