"""Exact-diagonalization reference for every circuit result.

The oracle never builds the ancilla circuit: S(t) is computed directly on the
system register, so circuit and oracle are independent implementations.
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import NumericalError
from .circuit import StateVector
from .hamiltonian import build_hamiltonian
from .jw import PauliHamiltonian, _check_dense, jordan_wigner, pauli_to_matrix
from .ramsey import RamseyConfig, RamseySignal, system_hamiltonians

logger = logging.getLogger("polaron_qsim.ed_oracle")

HERMITIAN_TOL = 1e-10


class DenseOperator:
    """Dense 2**n x 2**n operator; the eigendecomposition is computed once and reused."""

    def __init__(self, matrix: np.ndarray, n_qubits: int) -> None:
        self.matrix = np.asarray(matrix, dtype=complex)
        self.n_qubits = n_qubits
        self._eig: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def hermiticity_error(self) -> float:
        if self.matrix.size == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def require_hermitian(self) -> None:
        err = self.hermiticity_error()
        if err > HERMITIAN_TOL:
            raise NumericalError(f"operator is not Hermitian (max |M - M^dagger| = {err:.3e})")

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._eig is None:
            self.require_hermitian()
            w, v = np.linalg.eigh(self.matrix)
            self._eig = (w, v)
        return self._eig

    def eigenvalues(self) -> np.ndarray:
        return self.eigh()[0]

    def expectation(self, state: StateVector) -> float:
        return float(np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real)


def assemble(h: PauliHamiltonian) -> DenseOperator:
    _check_dense(h.n_qubits)
    dim = 1 << h.n_qubits
    m = np.zeros((dim, dim), dtype=complex)
    for term in h.terms:
        m += pauli_to_matrix(term)
    return DenseOperator(m, h.n_qubits)


def _evolve_amplitudes(op: DenseOperator, t: float, amps: np.ndarray) -> np.ndarray:
    w, v = op.eigh()
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ amps))


def evolve_exact(op: DenseOperator, t: float, state: StateVector) -> StateVector:
    if state.n_qubits != op.n_qubits:
        raise NumericalError(f"operator on {op.n_qubits} qubits, state on {state.n_qubits}")
    return StateVector(_evolve_amplitudes(op, t, state.amplitudes), state.n_qubits)


def overlap_signal(
    h: PauliHamiltonian, h0: PauliHamiltonian, psi0: StateVector, times: Sequence[float]
) -> np.ndarray:
    """Complex S(t) = <psi0| exp(+i H0 t) exp(-i H t) |psi0> on a time grid."""
    op, op0 = assemble(h), assemble(h0)
    w, v = op.eigh()
    w0, v0 = op0.eigh()
    c = v.conj().T @ psi0.amplitudes
    c0 = v0.conj().T @ psi0.amplitudes
    out = np.empty(len(times), dtype=complex)
    for k, t in enumerate(times):
        branch = v @ (np.exp(-1j * w * t) * c)
        ref = v0 @ (np.exp(-1j * w0 * t) * c0)
        out[k] = np.vdot(ref, branch)
    return out


def exact_signal(config: RamseyConfig) -> RamseySignal:
    h, h0 = system_hamiltonians(config)
    psi0 = StateVector.from_occupation(config.occupation())
    s = overlap_signal(h, h0, psi0, config.time_grid)
    logger.debug("exact signal on %d points, U_imp=%s", len(s), config.params.u_imp)
    return RamseySignal.from_complex(config.time_grid, s, provenance="ed")


def ground_state(op: DenseOperator) -> Tuple[float, StateVector]:
    w, v = op.eigh()
    return float(w[0]), StateVector(v[:, 0].copy(), op.n_qubits)


def ground_energy(config: RamseyConfig) -> float:
    h, _ = system_hamiltonians(config)
    return ground_state(assemble(h))[0]


def fermion_matrix(config: RamseyConfig) -> DenseOperator:
    """Dense image of the full impurity Hamiltonian on the system register."""
    return assemble(jordan_wigner(build_hamiltonian(config.lattice, config.params)))
