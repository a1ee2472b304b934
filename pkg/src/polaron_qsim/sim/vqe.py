"""Hardware-efficient VQE driven by SPSA, benchmarked against the ED ground energy."""
import logging
from dataclasses import dataclass, field
from math import pi
from typing import Callable, Literal, Optional, Protocol, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from ..errors import ConfigError
from .circuit import Gate, QuantumCircuit, StateVector, expectation, run_circuit
from .ed_oracle import assemble, ground_state
from .jw import PauliHamiltonian, PauliString

logger = logging.getLogger("polaron_qsim.vqe")

Objective = Callable[[np.ndarray], float]

CALIBRATION_STEPS = 25


class AnsatzSpec(BaseModel):
    """RY layers joined by CNOT entanglers, closed by a final RY layer.

    Occupation X gates come last, so a zero parameter vector prepares exactly
    the reference basis state.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_qubits: PositiveInt
    layers: PositiveInt = 2
    entangler: Literal["line", "ring"] = "line"
    occupation: Optional[Tuple[int, ...]] = None

    @property
    def parameter_count(self) -> int:
        return self.n_qubits * (self.layers + 1)

    def _pairs(self) -> list[tuple[int, int]]:
        pairs = [(q, q + 1) for q in range(self.n_qubits - 1)]
        if self.entangler == "ring" and self.n_qubits > 2:
            pairs.append((self.n_qubits - 1, 0))
        return pairs

    def circuit(self, params: Sequence[float]) -> QuantumCircuit:
        theta = np.asarray(params, dtype=float)
        if theta.shape != (self.parameter_count,):
            raise ConfigError(f"ansatz takes {self.parameter_count} parameters, got {theta.size}")
        n = self.n_qubits
        gates: list[Gate] = []
        for layer in range(self.layers + 1):
            gates.extend(Gate.ry(q, theta[layer * n + q]) for q in range(n))
            if layer < self.layers:
                gates.extend(Gate.cnot(a, b) for a, b in self._pairs())
        if self.occupation is not None:
            if len(self.occupation) != n:
                raise ConfigError(f"occupation has {len(self.occupation)} bits, ansatz has {n} qubits")
            gates.extend(Gate.x(q) for q, b in enumerate(self.occupation) if b)
        return QuantumCircuit(n, tuple(gates))

    def state(self, params: Sequence[float]) -> StateVector:
        return run_circuit(self.circuit(params))


def _measure_term(state: StateVector, term: PauliString, shots: int, rng: np.random.Generator) -> float:
    """Sample <P> by rotating each X/Y qubit into the Z basis and reading parities."""
    rotation: list[Gate] = []
    for q in term.support:
        if term.letters[q] == "X":
            rotation.append(Gate.h(q))
        elif term.letters[q] == "Y":
            rotation.append(Gate.rx(q, pi / 2))
    rotated = run_circuit(QuantumCircuit(state.n_qubits, tuple(rotation)), state) if rotation else state
    probs = np.clip(rotated.probabilities(), 0.0, None)
    counts = rng.multinomial(shots, probs / probs.sum())
    mask = sum(1 << q for q in term.support)
    idx = np.arange(probs.size)
    odd = np.array([bin(int(i) & mask).count("1") & 1 for i in idx], dtype=bool)
    mean = (counts[~odd].sum() - counts[odd].sum()) / shots
    return float(term.coefficient.real * mean)


def energy(
    params: Sequence[float],
    h: PauliHamiltonian,
    ansatz: AnsatzSpec,
    shots: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    if h.n_qubits != ansatz.n_qubits:
        raise ConfigError(f"Hamiltonian on {h.n_qubits} qubits, ansatz on {ansatz.n_qubits}")
    state = ansatz.state(params)
    if shots is None:
        return float(sum(expectation(state, t) for t in h.terms))
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    rng = rng if rng is not None else np.random.default_rng()
    total = 0.0
    for t in h.terms:
        total += t.coefficient.real if t.is_identity else _measure_term(state, t, shots, rng)
    return total


class SPSAConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    iterations: PositiveInt = 300
    a: float = Field(0.2, gt=0)
    c: float = Field(0.1, gt=0)
    alpha: float = Field(0.602, gt=0, le=1)
    gamma: float = Field(0.101, gt=0, le=0.5)
    stability: Optional[float] = Field(None, ge=0, alias="A")
    seed: int = 0
    shots: Optional[PositiveInt] = None
    calibrate: bool = True
    target_magnitude: float = Field(2 * pi / 10, gt=0)
    initial_point: Optional[Tuple[float, ...]] = None

    @property
    def resolved_stability(self) -> float:
        return self.stability if self.stability is not None else self.iterations / 10


@dataclass
class OptimizerResult:
    best_x: np.ndarray
    best_value: float
    trace: list[float] = field(default_factory=list)
    best_trace: list[float] = field(default_factory=list)
    evaluations: int = 0


class Optimizer(Protocol):
    def minimize(self, objective: Objective, x0: np.ndarray) -> OptimizerResult: ...


class SPSA:
    """Two-evaluation simultaneous-perturbation gradient descent.

    Gains: a_k = a / (k + 1 + A)^alpha, c_k = c / (k + 1)^gamma.
    """

    def __init__(self, cfg: SPSAConfig) -> None:
        self.cfg = cfg
        self.rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0]))

    def _delta(self, dim: int) -> np.ndarray:
        return self.rng.choice(np.array([-1.0, 1.0]), size=dim)

    def calibrate(self, objective: Objective, x0: np.ndarray) -> float:
        """Pick ``a`` so the first update step has magnitude ``target_magnitude``."""
        c = self.cfg.c
        avg = 0.0
        for _ in range(CALIBRATION_STEPS):
            d = self._delta(x0.size)
            avg += abs((objective(x0 + c * d) - objective(x0 - c * d)) / (2 * c))
        avg /= CALIBRATION_STEPS
        a = self.cfg.target_magnitude * (self.cfg.resolved_stability + 1) ** self.cfg.alpha / avg if avg > 1e-10 else 0.0
        if a < 1e-10:
            logger.warning("SPSA calibration failed, using a=%s", self.cfg.target_magnitude)
            a = self.cfg.target_magnitude
        logger.debug("SPSA calibrated a=%.4g (avg gradient magnitude %.4g)", a, avg)
        return a

    def minimize(self, objective: Objective, x0: np.ndarray) -> OptimizerResult:
        cfg = self.cfg
        x = np.array(x0, dtype=float)
        a = self.calibrate(objective, x) if cfg.calibrate else cfg.a
        big_a = cfg.resolved_stability
        best_x = x.copy()
        best = objective(x)
        evaluations = 1 + (2 * CALIBRATION_STEPS if cfg.calibrate else 0)
        result = OptimizerResult(best_x, best)
        for k in range(cfg.iterations):
            a_k = a / (k + 1 + big_a) ** cfg.alpha
            c_k = cfg.c / (k + 1) ** cfg.gamma
            d = self._delta(x.size)
            grad = (objective(x + c_k * d) - objective(x - c_k * d)) / (2 * c_k) * d
            x = x - a_k * grad
            value = objective(x)
            evaluations += 3
            if value < best:
                best, best_x = value, x.copy()
            result.trace.append(value)
            result.best_trace.append(best)
        result.best_x, result.best_value, result.evaluations = best_x, best, evaluations
        return result


@dataclass
class VQEResult:
    best_energy: float
    best_parameters: np.ndarray
    trace: list[float]
    best_trace: list[float]
    reference_energy: float
    evaluations: int

    @property
    def error(self) -> float:
        return abs(self.best_energy - self.reference_energy)

    def rows(self) -> list[tuple[int, float, float]]:
        return [(k, e, b) for k, (e, b) in enumerate(zip(self.trace, self.best_trace))]


def spsa_minimize(
    h: PauliHamiltonian,
    ansatz: AnsatzSpec,
    cfg: SPSAConfig,
    reference_energy: Optional[float] = None,
    optimizer: Optional[Optimizer] = None,
) -> VQEResult:
    if reference_energy is None:
        reference_energy = ground_state(assemble(h))[0]
    if cfg.initial_point is not None:
        x0 = np.asarray(cfg.initial_point, dtype=float)
        if x0.size != ansatz.parameter_count:
            raise ConfigError(f"initial_point has {x0.size} entries, ansatz needs {ansatz.parameter_count}")
    else:
        init_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 2]))
        x0 = init_rng.uniform(-pi, pi, ansatz.parameter_count)

    shot_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))

    def objective(theta: np.ndarray) -> float:
        return energy(theta, h, ansatz, cfg.shots, shot_rng)

    opt = optimizer if optimizer is not None else SPSA(cfg)
    res = opt.minimize(objective, x0)
    best_energy = res.best_value
    if cfg.shots is not None:
        # exact energy of the selected point
        best_energy = energy(res.best_x, h, ansatz)
    logger.info(
        "VQE: best %.6f, reference %.6f, %d evaluations", best_energy, reference_energy, res.evaluations
    )
    return VQEResult(best_energy, res.best_x, res.trace, res.best_trace, reference_energy, res.evaluations)
