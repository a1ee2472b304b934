"""Ancilla Ramsey protocol against the exact-diagonalization reference."""
from math import pi

import numpy as np
import pytest
from pydantic import ValidationError

from polaron_qsim.errors import ConfigError
from polaron_qsim.sim.ed_oracle import exact_signal
from polaron_qsim.sim.hamiltonian import HubbardParams, LatticeSpec
from polaron_qsim.sim.ramsey import (
    IDEAL_REFERENCE,
    RamseyConfig,
    RamseySignal,
    build_ramsey_circuit,
    circuit_signal_for,
    default_occupation,
    fidelity_r2,
    measure_signal,
    ramsey_circuit_for,
    system_hamiltonians,
    table_residual,
    uniform_grid,
)
from polaron_qsim.nodes.trotter_scan import error_slope


def _with(config: RamseyConfig, **updates) -> RamseyConfig:
    return config.model_copy(update=updates)


def _sup_error(config: RamseyConfig, n_steps: int) -> float:
    circuit = measure_signal(_with(config, n_steps=n_steps))
    return float(np.max(np.abs(circuit.re_s - exact_signal(config).re_s)))


def test_uniform_grid_and_default_occupation():
    grid = uniform_grid(4.0, 0.5)
    assert len(grid) == 9
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(4.0)
    assert default_occupation(LatticeSpec(bath_sites=2)) == (1, 1, 0)
    assert default_occupation(LatticeSpec(bath_sites=4)) == (1, 1, 1, 0, 0)
    with pytest.raises(ConfigError):
        uniform_grid(4.0, 0.0)


def test_config_validation():
    with pytest.raises(ValidationError):
        RamseyConfig(time_grid=(0.0, 1.0, 0.5))
    with pytest.raises(ValidationError):
        RamseyConfig(time_grid=(-0.5, 0.0))
    with pytest.raises(ValidationError):
        RamseyConfig(initial_occupation=(1, 0))
    with pytest.raises(ValidationError):
        RamseyConfig(initial_occupation=(1, 2, 0))
    with pytest.raises(ValidationError):
        RamseyConfig(n_steps=0)


def test_circuit_layout(default_config):
    c = build_ramsey_circuit(default_config, 1.0)
    assert c.n_qubits == 4
    assert [(g.kind, g.qubits) for g in c.gates[:3]] == [("X", (1,)), ("X", (2,)), ("H", (0,))]
    assert (c.gates[-1].kind, c.gates[-1].qubits) == ("H", (0,))
    im = build_ramsey_circuit(default_config, 1.0, imaginary=True)
    assert im.gates[-2].kind == "PHASE"
    assert im.gates[-2].angle == pytest.approx(-pi / 2)
    # t = 0 skips evolution entirely
    assert len(build_ramsey_circuit(default_config, 0.0)) == 4


def test_negative_time_rejected(default_config):
    h, h0 = system_hamiltonians(default_config)
    with pytest.raises(ConfigError):
        ramsey_circuit_for(h, h0, (1, 1, 0), -1.0)
    with pytest.raises(ConfigError):
        ramsey_circuit_for(h, h0, (1, 1), 1.0)


def test_signal_starts_at_one(default_config):
    for cfg in (default_config, _with(default_config, initial_occupation=(0, 1, 1))):
        signal = measure_signal(cfg)
        assert signal.re_s[0] == pytest.approx(1.0, abs=1e-12)
        assert signal.p0[0] == pytest.approx(1.0, abs=1e-12)


def test_no_interaction_gives_unit_signal(default_config):
    cfg = _with(default_config, params=HubbardParams(U_imp=0.0))
    assert np.allclose(measure_signal(cfg).re_s, 1.0, atol=1e-10)


def test_uniform_coupling_circuit_matches_oracle_exactly(default_config):
    circuit = measure_signal(default_config)
    ed = exact_signal(default_config)
    assert np.max(np.abs(circuit.re_s - ed.re_s)) < 1e-9
    assert np.allclose(circuit.p0 + circuit.p1, 1.0)


def test_random_uniform_models_match_oracle():
    rng = np.random.default_rng(11)
    grid = uniform_grid(4.0, 0.5)
    for _ in range(20):
        params = HubbardParams(
            J=float(rng.uniform(0.3, 1.5)),
            U_imp=float(rng.uniform(-3.0, 3.0)),
            hopping_sign=int(rng.choice([-1, 1])),
        )
        occupation = tuple(int(b) for b in rng.integers(0, 2, size=3))
        cfg = RamseyConfig(params=params, initial_occupation=occupation, time_grid=grid, n_steps=200)
        assert np.max(np.abs(measure_signal(cfg).re_s - exact_signal(cfg).re_s)) < 1e-3


def test_imaginary_part_matches_oracle(default_config):
    cfg = _with(default_config, measure_imaginary=True)
    circuit = measure_signal(cfg)
    ed = exact_signal(cfg)
    assert np.allclose(circuit.im_s, ed.im_s, atol=1e-9)
    assert np.allclose(circuit.complex_signal(), ed.complex_signal(), atol=1e-9)


def test_local_coupling_error_is_first_order(local_config):
    cfg = _with(local_config, time_grid=uniform_grid(4.0, 0.1))
    steps = [16, 32, 64, 128]
    errors = [_sup_error(cfg, n) for n in steps]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert -1.3 <= error_slope(steps, errors) <= -0.7


def test_single_step_diverges_while_fifteen_tracks():
    cfg = RamseyConfig(
        params=HubbardParams(J=0.6, U_imp=1.5, impurity_coupling="local"),
        time_grid=uniform_grid(4.0, 0.1),
    )
    coarse = _sup_error(cfg, 1)
    fine = _sup_error(cfg, 15)
    assert coarse > 0.5
    assert coarse >= 10 * fine


def test_shot_noise_matches_binomial_spread(default_config):
    h, h0 = system_hamiltonians(default_config)
    t, shots = 1.0, 1000
    exact = float(np.cos(2.5 * t))
    values = [
        circuit_signal_for(h, h0, (1, 1, 0), [t], shots=shots, seed=seed).re_s[0] for seed in range(200)
    ]
    expected = np.sqrt((1 - exact**2) / shots)
    assert np.std(values) == pytest.approx(expected, rel=0.2)
    assert np.mean(values) == pytest.approx(exact, abs=0.01)


def test_shot_mode_fidelity(default_config):
    exact = exact_signal(default_config)
    r2s = []
    for seed in range(20):
        noisy = measure_signal(_with(default_config, shots=1000, seed=seed))
        assert noisy.provenance == "shots(1000)"
        r2s.append(fidelity_r2(noisy, exact))
    assert np.median(r2s) >= 0.99


def test_threads_do_not_change_results(default_config):
    cfg = _with(default_config, shots=500, seed=3, measure_imaginary=True)
    serial = measure_signal(cfg)
    parallel = measure_signal(_with(cfg, threads=4))
    assert np.array_equal(serial.re_s, parallel.re_s)
    assert np.array_equal(serial.im_s, parallel.im_s)


def test_finite_size_recurrence(local_config):
    cfg = _with(local_config, time_grid=uniform_grid(40.0, 0.01))
    signal = exact_signal(cfg)
    late = signal.times >= 2.0
    assert np.max(np.abs(signal.complex_signal()[late])) > 0.99


def test_fidelity_r2_edge_cases(default_config):
    exact = exact_signal(default_config)
    assert fidelity_r2(exact, exact) == pytest.approx(1.0)
    zeros = RamseySignal.from_complex(exact.times, np.zeros(exact.times.size))
    assert fidelity_r2(zeros, exact) <= 0.0
    with pytest.raises(ConfigError):
        fidelity_r2(RamseySignal.from_complex([0.0, 1.0], np.ones(2)), exact)
    flat = RamseySignal.from_complex(exact.times, np.ones(exact.times.size))
    assert np.isnan(fidelity_r2(exact, flat))


def test_table_residual():
    times = [row[0] for row in IDEAL_REFERENCE]
    values = np.array([row[3] for row in IDEAL_REFERENCE])
    signal = RamseySignal.from_complex(times, values)
    assert table_residual(signal) == pytest.approx(0.0)
    shifted = RamseySignal.from_complex(times, values + 0.1)
    assert table_residual(shifted) == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        table_residual(RamseySignal.from_complex([0.0, 0.5], values[:2]))


def test_rows_use_reference_layout(default_config):
    rows = measure_signal(default_config).rows()
    assert len(rows) == 9
    t, p0, p1, s = rows[-1]
    assert t == pytest.approx(4.0)
    assert s == pytest.approx(p0 - p1)
