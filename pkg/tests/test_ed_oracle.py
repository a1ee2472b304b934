"""Exact-diagonalization reference."""
import numpy as np
import pytest

from polaron_qsim.errors import NumericalError
from polaron_qsim.sim.circuit import StateVector
from polaron_qsim.sim.ed_oracle import (
    DenseOperator,
    assemble,
    evolve_exact,
    exact_signal,
    fermion_matrix,
    ground_energy,
    ground_state,
    overlap_signal,
)
from polaron_qsim.sim.jw import PauliHamiltonian, PauliString
from polaron_qsim.sim.ramsey import system_hamiltonians, uniform_grid


def _two_level_signal(t: np.ndarray, j: float, u: float) -> np.ndarray:
    """One bath fermion hopping between two sites, impurity interacting with the first."""
    h = np.sqrt(j**2 + u**2 / 4)
    return np.exp(-0.5j * u * t) * (
        np.cos(j * t) * np.cos(h * t)
        + (j / h) * np.sin(j * t) * np.sin(h * t)
        - 1j * (u / (2 * h)) * np.cos(j * t) * np.sin(h * t)
    )


def test_single_z_spectrum():
    op = assemble(PauliHamiltonian(1, (PauliString(1.0, "Z"),)))
    assert np.allclose(op.matrix, np.diag([1.0, -1.0]))
    assert np.allclose(op.eigenvalues(), [-1.0, 1.0])


def test_ground_state_of_minus_z():
    energy, state = ground_state(assemble(PauliHamiltonian(1, (PauliString(-1.0, "Z"),))))
    assert energy == pytest.approx(-1.0)
    assert abs(state.amplitudes[0]) == pytest.approx(1.0)


def test_hopping_pair_ground_energy():
    h = PauliHamiltonian(2, (PauliString(-0.5, "XX"), PauliString(-0.5, "YY")))
    assert ground_state(assemble(h))[0] == pytest.approx(-1.0)


def test_default_model_ground_energy(default_config):
    assert ground_energy(default_config) == pytest.approx(-1.0, abs=1e-10)


def test_fermion_matrix_matches_system_hamiltonian(default_config):
    h, _ = system_hamiltonians(default_config)
    assert np.allclose(fermion_matrix(default_config).matrix, assemble(h).matrix)


def test_evolution_conserves_energy_and_norm(default_config):
    h, _ = system_hamiltonians(default_config)
    op = assemble(h)
    psi = StateVector.random(3, np.random.default_rng(1))
    e0 = op.expectation(psi)
    for t in (0.3, 1.7, 5.0):
        out = evolve_exact(op, t, psi)
        assert out.norm() == pytest.approx(1.0, abs=1e-12)
        assert op.expectation(out) == pytest.approx(e0, abs=1e-10)


def test_evolution_register_mismatch():
    op = assemble(PauliHamiltonian(1, (PauliString(1.0, "Z"),)))
    with pytest.raises(NumericalError):
        evolve_exact(op, 1.0, StateVector.zero(2))


def test_signal_starts_at_one_and_stays_bounded(default_config):
    signal = exact_signal(default_config.model_copy(update={"time_grid": uniform_grid(10.0, 0.1)}))
    assert signal.re_s[0] == pytest.approx(1.0)
    assert signal.im_s[0] == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.abs(signal.complex_signal()) <= 1.0 + 1e-12)
    assert signal.mode == "ed"


def test_no_interaction_gives_unit_signal(default_config):
    cfg = default_config.model_copy(
        update={"params": default_config.params.model_copy(update={"u_imp": 0.0})}
    )
    signal = exact_signal(cfg)
    assert np.allclose(signal.complex_signal(), 1.0, atol=1e-12)


def test_uniform_coupling_with_one_bath_fermion_is_a_pure_tone(default_config):
    times = np.array(uniform_grid(6.0, 0.25))
    h, h0 = system_hamiltonians(default_config)
    s = overlap_signal(h, h0, StateVector.from_occupation([1, 1, 0]), times)
    assert np.allclose(s, np.exp(-2.5j * times), atol=1e-10)


def test_local_coupling_matches_two_level_closed_form(local_config):
    times = np.array(uniform_grid(8.0, 0.1))
    h, h0 = system_hamiltonians(local_config)
    s = overlap_signal(h, h0, StateVector.from_occupation([1, 1, 0]), times)
    assert np.allclose(s, _two_level_signal(times, 1.0, 2.5), atol=1e-10)


def test_non_hermitian_operator_rejected():
    with pytest.raises(NumericalError):
        DenseOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), 1).eigh()
    op = assemble(PauliHamiltonian(1, (PauliString(1j, "X"),)))
    assert op.hermiticity_error() == pytest.approx(2.0)
    with pytest.raises(NumericalError):
        op.require_hermitian()
