"""Gate-level circuits and a dense statevector engine.

Qubit ``q`` is bit ``q`` of the basis index. Gate kernels index the leading
axis of the amplitude array, so the same code updates a single state
(shape ``(2**n,)``) or a stack of columns (shape ``(2**n, m)``), which is how
dense gate unitaries are built for the trajectory sampler.

MULTIRZ(theta) = exp(-i theta/2 Z...Z): phase exp(-i theta/2) on even parity of
the listed qubits, exp(+i theta/2) on odd parity.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import cos, sin, sqrt
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
import orjson

from ..errors import CapacityError, ConfigError
from .jw import MAX_DENSE_QUBITS, PauliString

GateKind = Literal["H", "X", "RX", "RY", "RZ", "CNOT", "PHASE", "MULTIRZ", "CONTROLLED"]

_SELF_INVERSE = {"H", "X", "CNOT"}

_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: Tuple[int, ...]
    angle: float = 0.0
    inner: Optional["Gate"] = None
    control_value: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(set(self.touched)) != len(self.touched):
            raise ConfigError(f"{self.kind} gate repeats a qubit: {self.touched}")
        if self.kind == "CONTROLLED":
            if self.inner is None or len(self.qubits) != 1:
                raise ConfigError("CONTROLLED needs one control qubit and an inner gate")
            if self.inner.kind == "CONTROLLED":
                raise ConfigError("CONTROLLED gates nest at most one level")
            if self.control_value not in (0, 1):
                raise ConfigError(f"control value must be 0 or 1, got {self.control_value}")
        elif self.kind == "CNOT" and len(self.qubits) != 2:
            raise ConfigError("CNOT takes (control, target)")
        elif self.kind == "MULTIRZ" and len(self.qubits) < 1:
            raise ConfigError("MULTIRZ needs at least one qubit")
        elif self.kind not in ("CNOT", "MULTIRZ") and len(self.qubits) != 1:
            raise ConfigError(f"{self.kind} acts on a single qubit")

    # constructors
    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("H", (q,))

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls("X", (q,))

    @classmethod
    def rx(cls, q: int, theta: float) -> "Gate":
        return cls("RX", (q,), float(theta))

    @classmethod
    def ry(cls, q: int, theta: float) -> "Gate":
        return cls("RY", (q,), float(theta))

    @classmethod
    def rz(cls, q: int, theta: float) -> "Gate":
        return cls("RZ", (q,), float(theta))

    @classmethod
    def phase(cls, q: int, theta: float) -> "Gate":
        return cls("PHASE", (q,), float(theta))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("CNOT", (control, target))

    @classmethod
    def multirz(cls, theta: float, qubits: Sequence[int]) -> "Gate":
        return cls("MULTIRZ", tuple(qubits), float(theta))

    @classmethod
    def controlled(cls, inner: "Gate", control: int, control_value: int = 1) -> "Gate":
        return cls("CONTROLLED", (control,), inner.angle, inner, control_value)

    @property
    def touched(self) -> Tuple[int, ...]:
        if self.kind == "CONTROLLED" and self.inner is not None:
            return self.qubits + self.inner.touched
        return self.qubits

    def inverse(self) -> "Gate":
        if self.kind in _SELF_INVERSE:
            return self
        if self.kind == "CONTROLLED":
            return Gate.controlled(self.inner.inverse(), self.qubits[0], self.control_value)
        return Gate(self.kind, self.qubits, -self.angle)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits), "angle": self.angle}
        if self.inner is not None:
            d["inner"] = self.inner.to_dict()
            d["control_value"] = self.control_value
        return d


@dataclass(frozen=True)
class QuantumCircuit:
    n_qubits: int
    gates: Tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.touched):
                raise ConfigError(f"gate {g.kind} on {g.touched} outside a {self.n_qubits}-qubit register")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "QuantumCircuit") -> "QuantumCircuit":
        if other.n_qubits != self.n_qubits:
            raise ConfigError("cannot compose circuits on different registers")
        return QuantumCircuit(self.n_qubits, self.gates + other.gates)

    def inverse(self) -> "QuantumCircuit":
        return QuantumCircuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)))

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if len(g.touched) >= 2)

    def to_json(self) -> bytes:
        return orjson.dumps(
            {"n_qubits": self.n_qubits, "gates": [g.to_dict() for g in self.gates]},
            option=orjson.OPT_INDENT_2,
        )


class StateVector:
    """Unit-norm amplitudes over 2**n basis states (qubit 0 = LSB)."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes: np.ndarray, n_qubits: Optional[int] = None) -> None:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if n_qubits is None else n_qubits
        if amps.size != 1 << n:
            raise ConfigError(f"{amps.size} amplitudes do not span {n} qubits")
        _check_register(n)
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        _check_register(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, n_qubits)

    @classmethod
    def from_occupation(cls, occupation: Sequence[int]) -> "StateVector":
        index = sum(int(b) << k for k, b in enumerate(occupation))
        return cls.basis(len(occupation), index)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
        return cls(amps / np.linalg.norm(amps), n_qubits)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def probability_one(self, q: int) -> float:
        _check_qubit(q, self.n_qubits)
        mask = (_basis_index(self.n_qubits) >> q) & 1
        return float(np.sum(np.abs(self.amplitudes[mask == 1]) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def _check_register(n: int) -> None:
    if n < 0:
        raise ConfigError("register size must be non-negative")
    if n > MAX_DENSE_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the dense statevector limit of {MAX_DENSE_QUBITS}")


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise ConfigError(f"qubit {q} out of range for a {n}-qubit register")


@lru_cache(maxsize=None)
def _basis_index(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _pairs(n: int, q: int, control: int, control_value: int) -> Tuple[np.ndarray, np.ndarray]:
    """Index pairs (bit q = 0, bit q = 1), restricted to the control subspace when control >= 0."""
    idx = _basis_index(n)
    sel = ((idx >> q) & 1) == 0
    if control >= 0:
        sel &= ((idx >> control) & 1) == control_value
    i0 = idx[sel]
    i1 = i0 | (1 << q)
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


@lru_cache(maxsize=None)
def _parity(n: int, qubits: Tuple[int, ...]) -> np.ndarray:
    idx = _basis_index(n)
    par = np.zeros(idx.size, dtype=np.int64)
    for q in qubits:
        par ^= (idx >> q) & 1
    par.setflags(write=False)
    return par


@lru_cache(maxsize=None)
def _control_mask(n: int, control: int, control_value: int) -> np.ndarray:
    mask = ((_basis_index(n) >> control) & 1) == control_value
    mask.setflags(write=False)
    return mask


def _single_matrix(g: Gate) -> np.ndarray:
    t = g.angle
    if g.kind == "H":
        return _H
    if g.kind == "X":
        return _X
    if g.kind == "RX":
        return np.array([[cos(t / 2), -1j * sin(t / 2)], [-1j * sin(t / 2), cos(t / 2)]], dtype=complex)
    if g.kind == "RY":
        return np.array([[cos(t / 2), -sin(t / 2)], [sin(t / 2), cos(t / 2)]], dtype=complex)
    if g.kind == "RZ":
        return np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], dtype=complex)
    if g.kind == "PHASE":
        return np.array([[1, 0], [0, np.exp(1j * t)]], dtype=complex)
    raise ConfigError(f"{g.kind} is not a single-qubit gate")


def _apply_1q(amps: np.ndarray, u: np.ndarray, q: int, n: int, control: int = -1, value: int = 1) -> None:
    i0, i1 = _pairs(n, q, control, value)
    a0 = amps[i0]
    a1 = amps[i1]
    amps[i0] = u[0, 0] * a0 + u[0, 1] * a1
    amps[i1] = u[1, 0] * a0 + u[1, 1] * a1


def _apply_multirz(amps: np.ndarray, theta: float, qubits: Tuple[int, ...], n: int, control: int = -1, value: int = 1) -> None:
    par = _parity(n, qubits)
    phases = np.where(par == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    if control >= 0:
        phases = np.where(_control_mask(n, control, value), phases, 1.0)
    if amps.ndim > 1:
        phases = phases[:, None]
    amps *= phases


def _apply_inplace(amps: np.ndarray, g: Gate, n: int, control: int = -1) -> None:
    if g.kind == "CONTROLLED":
        c = g.qubits[0]
        if g.control_value == 0:
            # controlled-on-zero: X-conjugate the control
            _apply_1q(amps, _X, c, n)
            _apply_inplace(amps, g.inner, n, control=c)
            _apply_1q(amps, _X, c, n)
        else:
            _apply_inplace(amps, g.inner, n, control=c)
        return
    if g.kind == "CNOT":
        if control >= 0:
            raise ConfigError("controlled CNOT would need a second control")
        _apply_1q(amps, _X, g.qubits[1], n, g.qubits[0], 1)
    elif g.kind == "MULTIRZ":
        _apply_multirz(amps, g.angle, g.qubits, n, control)
    else:
        _apply_1q(amps, _single_matrix(g), g.qubits[0], n, control)


def _validate(g: Gate, n: int) -> None:
    for q in g.touched:
        _check_qubit(q, n)


def apply_gate(state: StateVector, g: Gate, inplace: bool = False) -> StateVector:
    _validate(g, state.n_qubits)
    out = state if inplace else state.copy()
    _apply_inplace(out.amplitudes, g, out.n_qubits)
    return out


def run_circuit(c: QuantumCircuit, initial: Optional[StateVector] = None) -> StateVector:
    state = StateVector.zero(c.n_qubits) if initial is None else initial.copy()
    if state.n_qubits != c.n_qubits:
        raise ConfigError(f"circuit has {c.n_qubits} qubits, state has {state.n_qubits}")
    for g in c.gates:
        _apply_inplace(state.amplitudes, g, state.n_qubits)
    return state


def gate_unitary(g: Gate, n: int) -> np.ndarray:
    _validate(g, n)
    m = np.eye(1 << n, dtype=complex)
    _apply_inplace(m, g, n)
    return m


def circuit_unitary(c: QuantumCircuit) -> np.ndarray:
    _check_register(c.n_qubits)
    m = np.eye(1 << c.n_qubits, dtype=complex)
    for g in c.gates:
        _apply_inplace(m, g, c.n_qubits)
    return m


def decompose_multirz(g: Gate) -> list[Gate]:
    """CNOT parity ladder onto the last listed qubit around a (controlled) RZ."""
    controlled = g.kind == "CONTROLLED"
    core = g.inner if controlled else g
    if core is None or core.kind != "MULTIRZ":
        raise ConfigError(f"expected a (controlled) MULTIRZ, got {g.kind}")
    qs = core.qubits
    if len(qs) < 2:
        raise ConfigError("MULTIRZ decomposition needs at least two qubits")
    ladder = [Gate.cnot(qs[k], qs[k + 1]) for k in range(len(qs) - 1)]
    rz = Gate.rz(qs[-1], core.angle)
    if controlled:
        rz = Gate.controlled(rz, g.qubits[0], g.control_value)
    return ladder + [rz] + ladder[::-1]


def lower_to_native(c: QuantumCircuit) -> QuantumCircuit:
    """Expand every multi-qubit MULTIRZ into CNOT/RZ so each gate touches at most two qubits."""
    out: list[Gate] = []
    for g in c.gates:
        core = g.inner if g.kind == "CONTROLLED" else g
        if core is not None and core.kind == "MULTIRZ":
            if len(core.qubits) >= 2:
                out.extend(decompose_multirz(g))
                continue
            rz = Gate.rz(core.qubits[0], core.angle)
            out.append(Gate.controlled(rz, g.qubits[0], g.control_value) if g.kind == "CONTROLLED" else rz)
            continue
        out.append(g)
    return QuantumCircuit(c.n_qubits, tuple(out))


def measure_qubit(state: StateVector, q: int, shots: int, seed: int) -> Tuple[int, int]:
    """Sample ``shots`` independent preparations; the stored state is not collapsed."""
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    p1 = min(max(state.probability_one(q), 0.0), 1.0)
    rng = np.random.default_rng(seed)
    ones = int(rng.binomial(shots, p1))
    return shots - ones, ones


def apply_pauli(amps: np.ndarray, letters: str) -> np.ndarray:
    """Return P|psi> for the bare Pauli word (coefficient not applied)."""
    n = len(letters)
    idx = _basis_index(n)
    xmask = zmask = 0
    n_y = 0
    for q, p in enumerate(letters):
        if p in "XY":
            xmask |= 1 << q
        if p in "ZY":
            zmask |= 1 << q
        n_y += p == "Y"
    par = _parity(n, tuple(q for q in range(n) if (zmask >> q) & 1))
    phase = (1j**n_y) * np.where(par == 1, -1.0, 1.0)
    out = np.empty_like(amps)
    if amps.ndim > 1:
        out[idx ^ xmask] = phase[:, None] * amps
    else:
        out[idx ^ xmask] = phase * amps
    return out


def expectation(state: StateVector, p: PauliString) -> float:
    if p.n_qubits != state.n_qubits:
        raise ConfigError(f"Pauli string on {p.n_qubits} qubits, state on {state.n_qubits}")
    if abs(p.coefficient.imag) > 1e-12:
        raise ConfigError(f"expectation needs a real coefficient, got {p.coefficient}")
    if p.is_identity:
        return float(p.coefficient.real)
    val = np.vdot(state.amplitudes, apply_pauli(state.amplitudes, p.letters))
    return float(p.coefficient.real * val.real)
