"""First-order Trotter compilation of exp(-iHt), plain and ancilla-controlled.

Supported term shapes: identity (global phase), Z-only strings (RZ / MULTIRZ),
and hopping strings whose only non-Z letters are a matching X...X or Y...Y
pair (the Jordan-Wigner image of c_i^dagger c_j + h.c., Z tail included).
"""
import logging
from dataclasses import dataclass, field
from math import pi
from typing import Literal, Optional, Tuple

from ..errors import CompileError, ConfigError
from .circuit import Gate, QuantumCircuit
from .jw import PauliHamiltonian, PauliString

logger = logging.getLogger("polaron_qsim.trotter")

DEFAULT_N_STEPS = 15

TermOrdering = Literal["kinetic_first", "interaction_first", "as_given"]


def _is_kinetic(p: PauliString) -> bool:
    return any(c in "XY" for c in p.letters)


def check_supported(p: PauliString) -> None:
    if abs(p.coefficient.imag) > 1e-12:
        raise CompileError(f"term {p} has a complex coefficient")
    flips = [c for c in p.letters if c in "XY"]
    if not flips:
        return
    if len(flips) == 2 and flips[0] == flips[1]:
        return
    raise CompileError(f"term {p} is outside the compiler's gate alphabet")


def _order_key(p: PauliString) -> tuple:
    return (p.support, p.letters)


@dataclass(frozen=True)
class TrotterPlan:
    hamiltonian: PauliHamiltonian
    total_time: float
    n_steps: int = DEFAULT_N_STEPS
    ordering: TermOrdering = "kinetic_first"
    qubit_offset: int = 0
    register_size: Optional[int] = None
    term_order: Tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.total_time > 0:
            raise ConfigError(f"total_time must be > 0, got {self.total_time}")
        if self.qubit_offset < 0 or self.n_qubits < self.qubit_offset + self.hamiltonian.n_qubits:
            raise ConfigError("register too small for the Hamiltonian at this offset")
        for t in self.hamiltonian.terms:
            check_supported(t)
        object.__setattr__(self, "term_order", self._order())

    def _order(self) -> Tuple[int, ...]:
        idx = [i for i, t in enumerate(self.hamiltonian.terms) if not t.is_identity]
        if self.ordering == "as_given":
            return tuple(idx)
        terms = self.hamiltonian.terms
        kinetic = sorted((i for i in idx if _is_kinetic(terms[i])), key=lambda i: _order_key(terms[i]))
        interaction = sorted((i for i in idx if not _is_kinetic(terms[i])), key=lambda i: _order_key(terms[i]))
        if self.ordering == "interaction_first":
            return tuple(interaction + kinetic)
        return tuple(kinetic + interaction)

    @property
    def n_qubits(self) -> int:
        if self.register_size is not None:
            return self.register_size
        return self.qubit_offset + self.hamiltonian.n_qubits

    @property
    def dt(self) -> float:
        return self.total_time / self.n_steps

    @property
    def system_qubits(self) -> range:
        return range(self.qubit_offset, self.qubit_offset + self.hamiltonian.n_qubits)

    @property
    def global_phase(self) -> float:
        """Phase angle -c_I * t carried by the identity component of H."""
        return -self.hamiltonian.identity_coefficient * self.total_time


def _term_gates(p: PauliString, theta: float, offset: int, control: Optional[Tuple[int, int]]) -> list[Gate]:
    """exp(-i theta/2 P) with basis changes around a (controlled) rotation."""
    qubits = [q + offset for q in p.support]
    pre: list[Gate] = []
    post: list[Gate] = []
    for q in p.support:
        letter = p.letters[q]
        if letter == "X":
            pre.append(Gate.h(q + offset))
            post.append(Gate.h(q + offset))
        elif letter == "Y":
            # RX(pi/2)^dagger Z RX(pi/2) = Y
            pre.append(Gate.rx(q + offset, pi / 2))
            post.append(Gate.rx(q + offset, -pi / 2))
    core = Gate.rz(qubits[0], theta) if len(qubits) == 1 else Gate.multirz(theta, qubits)
    if control is not None:
        core = Gate.controlled(core, control[0], control[1])
    return pre + [core] + post


def _compile(plan: TrotterPlan, control: Optional[Tuple[int, int]]) -> QuantumCircuit:
    gates: list[Gate] = []
    terms = plan.hamiltonian.terms
    step: list[Gate] = []
    for i in plan.term_order:
        p = terms[i]
        step.extend(_term_gates(p, 2.0 * p.coefficient.real * plan.dt, plan.qubit_offset, control))
    for _ in range(plan.n_steps):
        gates.extend(step)
    return QuantumCircuit(plan.n_qubits, tuple(gates))


def trotter_circuit(plan: TrotterPlan) -> QuantumCircuit:
    """Uncontrolled product formula; the identity term's global phase is left in plan.global_phase."""
    circuit = _compile(plan, None)
    logger.debug("trotter circuit: %d gates, %d steps", len(circuit), plan.n_steps)
    return circuit


def controlled_trotter(plan: TrotterPlan, control: int, control_value: int = 1) -> QuantumCircuit:
    if control in plan.system_qubits:
        raise ConfigError(f"control qubit {control} overlaps the system register {list(plan.system_qubits)}")
    if not 0 <= control < plan.n_qubits:
        raise ConfigError(f"control qubit {control} outside a {plan.n_qubits}-qubit register")
    if control_value not in (0, 1):
        raise ConfigError(f"control value must be 0 or 1, got {control_value}")
    gates: list[Gate] = []
    phase = plan.global_phase
    if phase != 0.0:
        # controlled global phase is physical: it lands on the control qubit
        if control_value == 1:
            gates.append(Gate.phase(control, phase))
        else:
            gates.extend([Gate.x(control), Gate.phase(control, phase), Gate.x(control)])
    body = _compile(plan, (control, control_value))
    return QuantumCircuit(plan.n_qubits, tuple(gates) + body.gates)
