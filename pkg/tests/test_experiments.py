import json
from dataclasses import replace

import numpy as np
import pytest

from jssp_dqas import experiments as ex
from jssp_dqas.simulator import NoiseSpec

SMALL = ex.ExperimentConfig(trials=3, epochs=4, search_epochs=3, batch=2, shots=200, seed=1)


@pytest.fixture(scope="module")
def prob():
    return ex.setup(SMALL)


def test_config_roundtrip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(SMALL.to_dict()))
    assert ex.ExperimentConfig.load(path) == SMALL


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        ex.ExperimentConfig(trials=0)
    with pytest.raises(ValueError, match="unknown config keys"):
        ex.ExperimentConfig.from_dict({"trails": 3})
    with pytest.raises(FileNotFoundError):
        ex.ExperimentConfig.load(tmp_path / "missing.json")
    with pytest.raises(ValueError):
        ex.ExperimentConfig(noise="loud:0.1")


def test_config_instance_path_relative(tmp_path):
    from importlib import resources
    (tmp_path / "inst.json").write_text(resources.files("jssp_dqas.data").joinpath("d5.json").read_text())
    (tmp_path / "c.json").write_text(json.dumps({"instance": "inst.json"}))
    cfg = ex.ExperimentConfig.load(tmp_path / "c.json")
    assert ex.setup(cfg).qubo.num_vars == 5


def test_compute_asp():
    assert ex.compute_asp([0.5, 0.2, 0.0009, 0.0], 1e-3) == 2
    assert ex.compute_asp([0.5, 0.2], 1e-3) is None
    assert ex.compute_asp([1e-3], 1e-3) == 0


def test_one_trial_zero_epochs(prob):
    cfg = replace(SMALL, trials=1, epochs=0)
    rep, recs = ex.evaluate_arch(None, cfg, prob)
    assert len(rep.mean) == 1 and len(recs) == 1
    assert rep.asp == (0 if rep.mean[0] <= cfg.asp_tolerance else None)


def test_shared_theta0_prefix(prob):
    a = ex.shared_theta0(SMALL, 10)
    b = ex.shared_theta0(SMALL, 4)
    np.testing.assert_array_equal(a[:4], b)
    assert np.all(np.abs(a) <= SMALL.theta_init_scale)


def test_evaluate_circuits_bounds_and_asp(prob):
    circs = [ex.arch_circuit(prob, (2, 8, 7, 2)), ex.baseline(prob)]
    reports, records = ex.evaluate_circuits(circs, SMALL, prob)
    for rep in reports:
        assert all(0 <= e <= 1 for e in rep.mean)
        assert len(rep.mean) == SMALL.epochs + 1
        assert rep.trials == SMALL.trials
        for r in records[rep.label]:
            assert len(r.final_bits) == 5 and r.gate_count == rep.gate_count
    assert reports[1].gate_count == 23


def test_curves_csv_shape_and_asp(prob, tmp_path):
    circs = [ex.arch_circuit(prob, (8, 7, 8, 8)), ex.baseline(prob)]
    reports, _ = ex.evaluate_circuits(circs, SMALL, prob)
    ex.emit_outputs(reports, tmp_path, plot=False)
    text = (tmp_path / "curves.csv").read_text()
    rows = text.splitlines()
    assert rows[0] == "series,epoch,mean_e,std_e"
    assert len(rows) - 1 == (SMALL.epochs + 1) * len(reports)
    curves = ex.read_curves(text)
    for rep in reports:
        assert ex.compute_asp(curves[rep.label], SMALL.asp_tolerance) == rep.asp
    # the cnot chain circuit sits on the optimum from the start
    assert reports[0].asp == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["baseline"]["gate_count"] == 23
    first = (tmp_path / "curves.csv").read_bytes()
    ex.emit_outputs(reports, tmp_path, plot=False)
    assert (tmp_path / "curves.csv").read_bytes() == first


def test_emit_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        ex.emit_outputs([], tmp_path)
    rep = ex.AspReport("x", None, [], [], 1, 0, 0, 0.0, 0.0)
    with pytest.raises(ValueError, match="empty epoch list"):
        ex.curves_csv([rep])


def test_plot_written(prob, tmp_path):
    rep, _ = ex.evaluate_arch(None, replace(SMALL, trials=1, epochs=1), prob)
    ex.emit_outputs([rep], tmp_path, plot=True)
    assert (tmp_path / "curves.png").stat().st_size > 0


def test_zero_noise_matches_noiseless(prob):
    circs = [ex.baseline(prob)]
    clean, _ = ex.evaluate_circuits(circs, SMALL, prob)
    zero, _ = ex.evaluate_circuits(circs, SMALL, prob, NoiseSpec("bitflip", 0.0))
    assert ex.curves_csv(clean) == ex.curves_csv(zero)


def test_noise_study_kinds(prob):
    cfg = replace(SMALL, trials=2, epochs=1, noise_kinds=("bitflip", "phaseflip"))
    study = ex.noise_study([ex.baseline(prob)], cfg, prob)
    assert list(study) == ["bitflip", "phaseflip"]


def test_search_outputs_and_determinism(prob, tmp_path):
    a = ex.run_search(SMALL, tmp_path / "a", prob)
    b = ex.run_search(SMALL, tmp_path / "b", prob)
    for name in ("train_log.csv", "archs.json", "checkpoint.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert len(a.top) == SMALL.top_k
    assert ex.load_archs(tmp_path / "a" / "archs.json", prob.pool) == [list(t) for t in a.top]
    assert a.gate_counts == b.gate_counts


def test_op2_search_has_no_cz():
    cfg = replace(SMALL, pool="op2")
    out = ex.run_search(cfg)
    prob = ex.setup(cfg)
    assert all(prob.pool[c].gate_kind != "cz" for arch in out.top for c in arch)


def test_load_archs_pool_mismatch(prob, tmp_path):
    ex.run_search(SMALL, tmp_path, prob)
    with pytest.raises(ValueError, match="searched over"):
        ex.load_archs(tmp_path / "archs.json", ex.setup(replace(SMALL, pool="op2")).pool)


def test_parallel_matches_serial(prob):
    circs = [ex.arch_circuit(prob, (0, 7, 3, 8))]
    serial, _ = ex.evaluate_circuits(circs, SMALL, prob)
    par, _ = ex.evaluate_circuits(circs, replace(SMALL, workers=2), prob)
    assert ex.curves_csv(serial) == ex.curves_csv(par)


def test_sweep_rows():
    cfg = replace(SMALL, trials=1, epochs=1, search_epochs=1)
    rows = ex.sweep_structure(cfg, "placeholders", [1, 2])
    assert [r["value"] for r in rows] == [1, 2, "baseline"]
    assert rows[-1]["gate_count"] == 23
    with pytest.raises(ValueError):
        ex.sweep_structure(cfg, "depth", [1])
    with pytest.raises(ValueError):
        ex.sweep_structure(cfg, "blocks", [0])


def test_sweep_canonical_value_matches_search():
    cfg = replace(SMALL, trials=1, epochs=1, search_epochs=2)
    rows = ex.sweep_structure(cfg, "placeholders", [cfg.placeholders])
    prob = ex.setup(cfg)
    top = ex.run_search(cfg, problem=prob).top[0]
    assert rows[0]["arch"] == ex.arch_circuit(prob, top).label
