"""Numerical core: Hamiltonian, Jordan-Wigner, circuits, Trotter, Ramsey, ED, spectra, mitigation, VQE."""
from .circuit import Gate, QuantumCircuit, StateVector, run_circuit
from .ed_oracle import DenseOperator, assemble, exact_signal, ground_state
from .hamiltonian import HubbardParams, LatticeSpec, build_bath_hamiltonian, build_hamiltonian
from .jw import PauliHamiltonian, PauliString, jordan_wigner
from .ramsey import RamseyConfig, RamseySignal, measure_signal
from .trotter import TrotterPlan, controlled_trotter, trotter_circuit

__all__ = [
    "DenseOperator",
    "Gate",
    "HubbardParams",
    "LatticeSpec",
    "PauliHamiltonian",
    "PauliString",
    "QuantumCircuit",
    "RamseyConfig",
    "RamseySignal",
    "StateVector",
    "TrotterPlan",
    "assemble",
    "build_bath_hamiltonian",
    "build_hamiltonian",
    "controlled_trotter",
    "exact_signal",
    "ground_state",
    "jordan_wigner",
    "measure_signal",
    "run_circuit",
    "trotter_circuit",
]
