"""Compute nodes run through ``run_pipeline`` without touching disk."""
import math

import pytest

from polaron_qsim.adapters.config_loader import load_run_config
from polaron_qsim.graph import PIPELINES, run_pipeline
from polaron_qsim.nodes.calibration import occupation_patterns
from polaron_qsim.sim.hamiltonian import LatticeSpec


def _run(command: str, **overrides):
    return run_pipeline(command, load_run_config(None, overrides), write=False)


def test_every_command_has_a_pipeline():
    assert set(PIPELINES) == {"benchmark", "ramsey", "spectrum", "heatmap", "vqe", "trotter-scan", "calibrate", "mitigate"}


def test_unknown_command():
    with pytest.raises(KeyError):
        run_pipeline("plot", load_run_config())


def test_ramsey_node_keeps_artifacts_in_memory():
    state = _run("ramsey", protocol={"shots": 300, "measure_imaginary": True})
    assert state.tables["ramsey"].columns == ["t", "P0", "P1", "S", "ImS"]
    assert "ramsey_circuit.json" in state.blobs
    assert state.artifacts == []
    assert state.summary["points"] == 9


def test_spectrum_peak_sits_at_interaction_energy():
    state = _run("spectrum")
    assert state.summary["E_peak"] == pytest.approx(2.5, abs=0.05)
    assert not state.summary["degenerate"]
    assert state.tables["spectrum"].columns == ["omega", "amplitude"]


def test_heatmap_tracks_molecular_branch():
    state = _run("heatmap", spectrum={"u_start": 3.0, "u_stop": 5.0, "u_step": 0.5})
    assert len(state.tables["peak_track"].rows) == 5
    for u, e_peak, _ in state.tables["peak_track"].rows:
        assert e_peak == pytest.approx(u, abs=0.05)
    fit = state.summary["branch_fit"]
    assert 0.85 <= fit["slope"] <= 1.15
    assert all(max(row[1:]) == pytest.approx(1.0) for row in state.tables["heatmap"].rows)


def test_heatmap_without_enough_branch_points():
    state = _run("heatmap", spectrum={"t_max": 10.0, "u_start": 0.5, "u_stop": 1.5, "u_step": 0.5})
    assert state.summary["branch_fit"] is None


def test_trotter_scan_on_local_coupling():
    state = _run("trotter-scan", trotter_scan={"steps": [1, 4, 15]})
    errors = {row[0]: row[1] for row in state.tables["trotter_scan"].rows}
    assert errors[1] > errors[4] > errors[15]
    assert state.summary["impurity_coupling"] == "local"
    assert state.summary["U_imp"] == 1.5
    assert not state.summary["exact_product_formula"]
    assert state.summary["ratio_1_vs_15"] >= 10
    gates = [row[2] for row in state.tables["trotter_scan"].rows]
    assert gates == sorted(gates)


def test_trotter_scan_flags_exact_product_formula():
    state = _run("trotter-scan", trotter_scan={"steps": [1, 4], "dt": 0.5, "impurity_coupling": "uniform"})
    assert state.summary["exact_product_formula"]
    assert state.summary["slope"] is None


def test_occupation_patterns():
    assert occupation_patterns(LatticeSpec(bath_sites=2)) == [(1, 1, 0), (1, 0, 1)]


def test_calibration_ranks_candidates():
    grid = {"J": [1.0], "U_imp": [2.5, 1.5], "couplings": ["uniform"], "hopping_signs": [-1], "n_steps": [15]}
    state = _run("calibrate", calibration=grid)
    rows = state.tables["calibration"].rows
    assert state.summary["candidates"] == len(rows) == 4
    residuals = [r[-1] for r in rows]
    assert residuals == sorted(residuals)
    assert state.summary["best_max_residual"] == residuals[0]


def test_mitigation_study_reports_every_scale():
    state = _run("mitigate", noise={"shots": 1000, "scales": [1, 3, 5]})
    rows = state.tables["mitigation"].rows
    assert [r[0] for r in rows] == [1, 3, 5]
    assert rows[1][1] == 3 * rows[0][1]
    assert state.summary["n_steps"] == 1
    assert state.summary["S_ideal"] == pytest.approx(math.cos(6.25), abs=1e-9)
    assert abs(state.summary["S_zne_readout_corrected"] - state.summary["S_ideal"]) < 0.2


def test_vqe_node_respects_variational_bound():
    assert load_run_config().vqe.calibrate
    state = _run("vqe", vqe={"iterations": 20})
    assert len(state.tables["vqe_trace"].rows) == 20
    assert state.summary["reference_energy"] == pytest.approx(-1.0, abs=1e-9)
    assert state.summary["best_energy"] >= state.summary["reference_energy"] - 1e-9
