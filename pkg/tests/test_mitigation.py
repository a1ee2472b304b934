"""Noise sampling, unitary folding, zero-noise extrapolation and readout correction."""
import numpy as np
import pytest

from polaron_qsim.errors import ConfigError, NumericalError
from polaron_qsim.sim.circuit import Gate, QuantumCircuit, StateVector, circuit_unitary, measure_qubit, run_circuit
from polaron_qsim.sim.mitigation import (
    ConfusionMatrix,
    NoiseModel,
    apply_readout_noise,
    correct_readout,
    fold,
    noisy_z_expectation,
    run_noisy,
    zne_extrapolate,
)
from polaron_qsim.sim.ramsey import ANCILLA, build_ramsey_circuit


def _cnot_train(pairs: int) -> QuantumCircuit:
    """X on qubit 0 then CNOT pairs that cancel; ideal <Z_0> = -1."""
    gates = [Gate.x(0)] + [Gate.cnot(0, 1)] * (2 * pairs)
    return QuantumCircuit(2, tuple(gates))


def test_fold_preserves_unitary():
    c = QuantumCircuit(2, (Gate.h(0), Gate.ry(1, 0.3), Gate.cnot(0, 1), Gate.rz(1, -0.8)))
    for scale in (1, 3, 5):
        folded = fold(c, scale)
        assert folded.scale_factor == scale
        assert len(folded.circuit) == scale * len(c)
        assert np.allclose(circuit_unitary(folded.circuit), circuit_unitary(c), atol=1e-12)


@pytest.mark.parametrize("scale", [0, 2, 4, 2.5])
def test_fold_rejects_even_or_fractional_scales(scale):
    with pytest.raises(ConfigError):
        fold(QuantumCircuit(1, (Gate.h(0),)), scale)


def test_zne_linear_and_constant():
    linear = zne_extrapolate([(1, 0.9), (3, 0.7), (5, 0.5)], method="linear")
    assert linear.zero_noise_estimate == pytest.approx(1.0)
    assert linear.fit_residual == pytest.approx(0.0, abs=1e-12)
    flat = zne_extrapolate([(1, 0.4), (3, 0.4), (5, 0.4)])
    assert flat.zero_noise_estimate == pytest.approx(0.4)


def test_zne_quadratic_is_exact_for_quadratics():
    points = [(x, 1.0 - 0.1 * x + 0.01 * x**2) for x in (5, 1, 3)]
    result = zne_extrapolate(points, order=2)
    assert result.zero_noise_estimate == pytest.approx(1.0)
    assert result.noise_scales == [1.0, 3.0, 5.0]


def test_zne_exponential_recovers_decay():
    points = [(x, 0.2 + 0.8 * np.exp(-0.3 * x)) for x in (1, 2, 3, 4, 5)]
    result = zne_extrapolate(points, method="exponential")
    assert result.zero_noise_estimate == pytest.approx(1.0, abs=1e-3)
    assert result.method == "exponential"


def test_zne_underdetermined_fits_fail():
    with pytest.raises(NumericalError):
        zne_extrapolate([(1, 0.9), (3, 0.7)], order=2)
    with pytest.raises(NumericalError):
        zne_extrapolate([(1, 0.9), (1, 0.8), (1, 0.7)], method="linear")
    with pytest.raises(NumericalError):
        zne_extrapolate([])


def test_confusion_matrix_validation():
    with pytest.raises(ConfigError):
        ConfusionMatrix([[0.9, 0.2], [0.1, 0.9]])
    with pytest.raises(ConfigError):
        ConfusionMatrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    m = ConfusionMatrix.from_error_rates(0.02, 0.05)
    assert np.allclose(m.m, [[0.98, 0.02], [0.05, 0.95]])
    assert ConfusionMatrix.identity().determinant == pytest.approx(1.0)


def test_readout_correction_inverts_mixing():
    m = ConfusionMatrix([[0.85, 0.15], [0.1, 0.9]])
    p_exp = m.mix([0.7, 0.3])
    assert p_exp.sum() == pytest.approx(1.0)
    fixed = correct_readout(m, p_exp)
    assert fixed.probabilities == pytest.approx((0.7, 0.3), abs=1e-12)
    assert not fixed.clipped


def test_readout_correction_clips_outside_simplex():
    fixed = correct_readout(ConfusionMatrix.symmetric(0.1), (1.0, 0.0))
    assert fixed.clipped
    assert fixed.probabilities == pytest.approx((1.0, 0.0))


def test_singular_confusion_matrix():
    with pytest.raises(NumericalError):
        correct_readout(ConfusionMatrix.symmetric(0.5), (0.5, 0.5))


def test_sampled_readout_noise_is_corrected():
    m = ConfusionMatrix([[0.85, 0.15], [0.1, 0.9]])
    shots = 10_000
    noisy = apply_readout_noise(m, (9000, 1000), seed=12)
    assert sum(noisy) == shots
    assert noisy[1] / shots == pytest.approx(0.225, abs=0.02)
    fixed = correct_readout(m, (noisy[0] / shots, noisy[1] / shots))
    assert fixed.probabilities == pytest.approx((0.9, 0.1), abs=0.02)


def test_noiseless_model_matches_ideal_sampling():
    c = QuantumCircuit(2, (Gate.h(0), Gate.cnot(0, 1), Gate.ry(1, 0.4)))
    noise = NoiseModel(depolarizing_p1=0.0, depolarizing_p2=0.0, seed=9)
    assert noise.is_noiseless
    expected = measure_qubit(run_circuit(c), 1, 500, 9)
    assert run_noisy(c, None, noise, 500, 1) == expected


def test_single_gate_depolarizing_rate():
    # X|0> then a random Pauli with probability p: X and Y flip the outcome, Z does not
    p = 0.6
    noise = NoiseModel(depolarizing_p1=p, depolarizing_p2=0.0, seed=1)
    c0, c1 = run_noisy(QuantumCircuit(1, (Gate.x(0),)), StateVector.zero(1), noise, 20_000, 0)
    assert c0 + c1 == 20_000
    assert c1 / 20_000 == pytest.approx((1 - p) + p / 3, abs=0.02)


def test_noisy_sampling_is_thread_independent():
    c = _cnot_train(5)
    noise = NoiseModel(depolarizing_p1=0.01, depolarizing_p2=0.05, seed=21)
    assert run_noisy(c, None, noise, 3000, 0, threads=1) == run_noisy(c, None, noise, 3000, 0, threads=4)


def test_gate_noise_is_sampled_on_wide_registers():
    # seven qubits take the gate-by-gate path instead of cached suffix products
    gates = [Gate.x(0)] + [Gate.cnot(0, q) for q in range(1, 7)] * 2
    c = QuantumCircuit(7, tuple(gates))
    noise = NoiseModel(depolarizing_p1=0.0, depolarizing_p2=0.02, seed=4)
    value = noisy_z_expectation(c, noise, 4000, qubit=0)
    flip = 0.02 * 8 / 15
    assert value == pytest.approx(-((1 - 2 * flip) ** 12), abs=0.05)


@pytest.mark.slow
def test_zne_reduces_gate_noise_bias():
    base = _cnot_train(5)
    shots = 10_000
    points = []
    for scale in (1, 3, 5):
        noise = NoiseModel(depolarizing_p1=0.0, depolarizing_p2=0.01, seed=100 + scale)
        points.append((scale, noisy_z_expectation(fold(base, scale).circuit, noise, shots)))
    raw_error = abs(points[0][1] + 1.0)
    mitigated = zne_extrapolate(points, order=2).zero_noise_estimate
    assert raw_error > 0.05
    assert abs(mitigated + 1.0) < 0.05
    assert abs(mitigated + 1.0) < raw_error


def test_readout_correction_improves_most_trials():
    m = ConfusionMatrix([[0.85, 0.15], [0.1, 0.9]])
    truth = np.array([0.9, 0.1])
    improved = 0
    for seed in range(200):
        noisy = np.array(apply_readout_noise(m, (900, 100), seed=seed)) / 1000
        fixed = np.array(correct_readout(m, noisy).probabilities)
        improved += np.abs(fixed - truth).sum() < np.abs(noisy - truth).sum()
    assert improved >= 160


@pytest.mark.slow
def test_zne_improves_noisy_ramsey_point(default_config):
    # a single step is exact for uniform coupling: S(2.5) = cos(6.25)
    circuit = build_ramsey_circuit(default_config.model_copy(update={"n_steps": 1}), 2.5)
    ideal = 1.0 - 2.0 * run_circuit(circuit).probability_one(ANCILLA)
    assert ideal == pytest.approx(np.cos(6.25), abs=1e-9)
    better = 0
    for trial in range(100):
        points = []
        for scale in (1, 3, 5):
            noise = NoiseModel(depolarizing_p1=0.001, depolarizing_p2=0.01, seed=10 * trial + scale)
            points.append((scale, noisy_z_expectation(fold(circuit, scale).circuit, noise, 4000, qubit=ANCILLA)))
        mitigated = zne_extrapolate(points, order=2).zero_noise_estimate
        better += abs(mitigated - ideal) < abs(points[0][1] - ideal)
    assert better >= 80
