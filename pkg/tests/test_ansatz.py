import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from jssp_dqas import ansatz
from jssp_dqas.ansatz import OpCandidate, OperationPool, expand_candidate
from jssp_dqas.simulator import probabilities, run_circuit

OP1 = ansatz.make_pool("op1")
OP2 = ansatz.make_pool("op2")
PC = ansatz.make_placeholder_circuit(5, 4)


def test_pool_sizes():
    assert OP1.size == 9 and OP2.size == 8
    assert not any(c.gate_kind == "cz" for c in OP2.candidates)
    full_id = OpCandidate("identity", (0, 1, 2, 3, 4))
    assert full_id in OP1.candidates and full_id in OP2.candidates


def test_pool_validation():
    with pytest.raises(ValueError):
        OperationPool("x", (OpCandidate("rx", (0,)),))
    with pytest.raises(ValueError):
        OperationPool("x", (OpCandidate("rx", (0,)), OpCandidate("rx", (0,))))
    with pytest.raises(ValueError):
        ansatz.make_pool("op3")
    with pytest.raises(ValueError):
        OpCandidate("rx", (0, 0))


def test_ring_and_chain():
    ring = expand_candidate(OpCandidate("cnot", (0, 1, 2, 3, 4)), 5)
    assert [g.targets for g in ring] == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]
    chain = expand_candidate(OpCandidate("cnot", (0, 1, 2, 3)), 5)
    assert [g.targets for g in chain] == [(0, 1), (1, 2), (2, 3)]
    assert expand_candidate(OpCandidate("identity", (0, 1, 2, 3, 4)), 5) == []


def test_range_errors():
    with pytest.raises(ValueError):
        expand_candidate(OpCandidate("ry", (0, 5)), 5)
    with pytest.raises(ValueError):
        expand_candidate(OpCandidate("cz", (2,)), 5)


def test_param_count_example():
    idx = {c: i for i, c in enumerate(OP1.candidates)}
    arch = [idx[OpCandidate("cz", (0, 1, 2, 3))], idx[OpCandidate("ry", (0, 1, 2, 3, 4))],
            idx[OpCandidate("rz", (0, 1, 2, 3, 4))], idx[OpCandidate("ry", (0, 1, 2, 3, 4))]]
    gates, k = ansatz.assemble_circuit(PC, OP1, arch)
    assert k == 15
    assert ansatz.gate_count(gates) == 5 + 3 + 15


def test_identity_arch():
    ident = OP1.candidates.index(OpCandidate("identity", (0, 1, 2, 3, 4)))
    gates, k = ansatz.assemble_circuit(PC, OP1, [ident] * 4)
    assert k == 0 and ansatz.gate_count(gates) == 5
    assert ansatz.gate_count(PC.encoding) == 5


def test_baseline_layout():
    gates, k = ansatz.baseline_circuit(5)
    assert ansatz.gate_count(gates) == 23 and k == 10


def test_assembly_errors():
    with pytest.raises(ValueError):
        ansatz.assemble_circuit(PC, OP1, [0, 0, 0])
    with pytest.raises(ValueError):
        ansatz.assemble_circuit(PC, OP1, [0, 0, 0, 9])


archs = st.lists(st.integers(0, 8), min_size=4, max_size=4)


@given(archs)
def test_assembly_deterministic_and_slots_contiguous(arch):
    g1, k1 = ansatz.assemble_circuit(PC, OP1, arch)
    g2, k2 = ansatz.assemble_circuit(PC, OP1, arch)
    assert g1 == g2 and k1 == k2
    slots = [s for g in g1 for s in g.param_slots]
    assert slots == list(range(k1))


@given(archs, st.integers(0, 2 ** 16))
def test_shared_bank_equals_local(arch, seed):
    bank = np.random.default_rng(seed).uniform(0, 2 * math.pi, ansatz.bank_size(PC))
    shared = ansatz.assemble_shared(PC, OP1, arch)
    local, _ = ansatz.assemble_circuit(PC, OP1, arch)
    theta = ansatz.bank_to_local(PC, OP1, arch, bank)
    np.testing.assert_allclose(run_circuit(shared, bank, 5), run_circuit(local, theta, 5), atol=1e-12)


def test_bank_slices_disjoint():
    seen = set()
    for ph in range(PC.slots):
        for kind in ("rx", "ry", "rz"):
            for q in range(5):
                s = ansatz.bank_slot(ph, kind, q, 0, 5)
                assert s not in seen
                seen.add(s)
    assert seen == set(range(ansatz.bank_size(PC)))


def test_blocks_multiply_slots():
    pc = ansatz.make_placeholder_circuit(5, 2, block_count=3)
    assert pc.slots == 6 and ansatz.bank_size(pc) == 90


def test_arch_json_roundtrip():
    arch = [0, 6, 7, 8]
    assert ansatz.arch_from_json(OP1, ansatz.arch_to_json(OP1, arch)) == arch
    with pytest.raises(ValueError, match="not in pool"):
        ansatz.arch_from_json(OP2, ansatz.arch_to_json(OP1, [6]))


def test_cnot_chain_reaches_d5_optimum():
    # encoding gives |11111>; the open chain on [0..3] maps it to 10101
    gates, _ = ansatz.assemble_circuit(PC, OP1, [8, 7, 8, 8])
    p = probabilities(run_circuit(gates, [], 5))
    assert p[0b10101] == pytest.approx(1.0)


def test_draw():
    gates, _ = ansatz.assemble_circuit(PC, OP1, [6, 0, 8, 8])
    text = ansatz.draw(gates, 5)
    assert text.count("\n") == 4 and "RY(t0)" in text and "@" in text
