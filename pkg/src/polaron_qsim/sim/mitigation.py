"""Synthetic gate noise, unitary folding, zero-noise extrapolation and readout correction."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import curve_fit

from ..errors import ConfigError, NumericalError
from .circuit import (
    QuantumCircuit,
    StateVector,
    apply_pauli,
    gate_unitary,
    lower_to_native,
    measure_qubit,
    run_circuit,
)

logger = logging.getLogger("polaron_qsim.mitigation")

SHOT_CHUNK = 256
SINGULAR_TOL = 1e-12
# dense suffix products are cached up to this register size
SUFFIX_CACHE_QUBITS = 5

ZNEMethod = Literal["poly", "linear", "exponential"]


class NoiseModel(BaseModel):
    """Depolarizing-style Pauli noise after every native gate."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    depolarizing_p1: float = Field(0.001, ge=0.0, lt=1.0)
    depolarizing_p2: float = Field(0.01, ge=0.0, lt=1.0)
    seed: int = 0

    @property
    def is_noiseless(self) -> bool:
        return self.depolarizing_p1 == 0.0 and self.depolarizing_p2 == 0.0


def _random_pauli(rng: np.random.Generator, qubits: Tuple[int, ...], n: int) -> str:
    code = int(rng.integers(1, 4 ** len(qubits)))
    letters = ["I"] * n
    for q in qubits:
        letters[q] = "IXYZ"[code & 3]
        code >>= 2
    return "".join(letters)


class _TrajectorySampler:
    """Samples Pauli-error trajectories of a fixed native circuit.

    Every trajectory starts from the noiseless prefix state at its first error;
    later errors are applied by moving through cached suffix products.
    """

    def __init__(self, circuit: QuantumCircuit, initial: StateVector, noise: NoiseModel, qubit: int) -> None:
        self.n = circuit.n_qubits
        self.gates = circuit.gates
        self.qubit = qubit
        self.probs = np.array(
            [noise.depolarizing_p2 if len(g.touched) >= 2 else noise.depolarizing_p1 for g in self.gates]
        )
        self.prefix: list[np.ndarray] = []
        state = initial.copy()
        for g in self.gates:
            state = run_circuit(QuantumCircuit(self.n, (g,)), state)
            self.prefix.append(state.amplitudes.copy())
        self.ideal_end = state.amplitudes.copy()
        self.ideal_p1 = min(max(state.probability_one(qubit), 0.0), 1.0)
        self.suffix: Optional[list[np.ndarray]] = None
        if self.n <= SUFFIX_CACHE_QUBITS:
            dim = 1 << self.n
            suffix = [np.eye(dim, dtype=complex)]
            for g in reversed(self.gates[1:]):
                suffix.append(suffix[-1] @ gate_unitary(g, self.n))
            self.suffix = suffix[::-1]

    def _evolve_rest(self, amps: np.ndarray, start: int, stop: int) -> np.ndarray:
        state = StateVector(amps, self.n)
        return run_circuit(QuantumCircuit(self.n, self.gates[start:stop]), state).amplitudes

    def trajectory_p1(self, rng: np.random.Generator, hits: np.ndarray) -> float:
        if self.suffix is not None:
            end = None
            for g in hits:
                at = self.prefix[g] if end is None else self.suffix[g].conj().T @ end
                at = apply_pauli(at, _random_pauli(rng, self.gates[g].touched, self.n))
                end = self.suffix[g] @ at
        else:
            amps = self.prefix[hits[0]]
            for k, g in enumerate(hits):
                amps = apply_pauli(amps, _random_pauli(rng, self.gates[g].touched, self.n))
                stop = hits[k + 1] + 1 if k + 1 < len(hits) else len(self.gates)
                amps = self._evolve_rest(amps, g + 1, stop)
            end = amps
        return min(max(StateVector(end, self.n).probability_one(self.qubit), 0.0), 1.0)

    def sample_chunk(self, shots: int, seed_seq: np.random.SeedSequence) -> int:
        rng = np.random.default_rng(seed_seq)
        ones = 0
        clean = 0
        for _ in range(shots):
            hits = np.flatnonzero(rng.random(self.probs.size) < self.probs)
            if hits.size == 0:
                clean += 1
                continue
            ones += int(rng.random() < self.trajectory_p1(rng, hits))
        return ones + int(rng.binomial(clean, self.ideal_p1))


def run_noisy(
    c: QuantumCircuit,
    initial: Optional[StateVector],
    noise: NoiseModel,
    shots: int,
    measured_qubit: int,
    threads: int = 1,
) -> Tuple[int, int]:
    """Counts (c0, c1) of ``measured_qubit`` over independent noisy trajectories."""
    if shots < 1:
        raise ConfigError("shots must be >= 1")
    initial = StateVector.zero(c.n_qubits) if initial is None else initial
    if noise.is_noiseless:
        return measure_qubit(run_circuit(c, initial), measured_qubit, shots, noise.seed)
    sampler = _TrajectorySampler(lower_to_native(c), initial, noise, measured_qubit)
    sizes = [min(SHOT_CHUNK, shots - start) for start in range(0, shots, SHOT_CHUNK)]
    seeds = np.random.SeedSequence(noise.seed).spawn(len(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ones = sum(pool.map(sampler.sample_chunk, sizes, seeds))
    else:
        ones = sum(sampler.sample_chunk(s, q) for s, q in zip(sizes, seeds))
    return shots - ones, ones


def noisy_z_expectation(
    c: QuantumCircuit, noise: NoiseModel, shots: int, qubit: int = 0, initial: Optional[StateVector] = None, threads: int = 1
) -> float:
    c0, c1 = run_noisy(c, initial, noise, shots, qubit, threads)
    return (c0 - c1) / shots


# unitary folding


@dataclass(frozen=True)
class FoldedCircuit:
    base: QuantumCircuit
    scale_factor: int
    circuit: QuantumCircuit


def fold(c: QuantumCircuit, scale: int) -> FoldedCircuit:
    """Global folding U (U^dagger U)^((scale - 1) / 2)."""
    if int(scale) != scale or scale < 1 or scale % 2 == 0:
        raise ConfigError(f"fold scale must be an odd integer >= 1, got {scale}")
    scale = int(scale)
    folded = c
    inverse = c.inverse()
    for _ in range((scale - 1) // 2):
        folded = folded + inverse + c
    return FoldedCircuit(c, scale, folded)


# zero-noise extrapolation


@dataclass
class ZNEResult:
    noise_scales: list[float]
    values: list[float]
    zero_noise_estimate: float
    fit_residual: float
    method: ZNEMethod


def _exp_decay(x, a, b, k):
    return a + b * np.exp(-k * x)


def zne_extrapolate(
    points: Sequence[Tuple[float, float]], order: int = 2, method: ZNEMethod = "poly"
) -> ZNEResult:
    if not points:
        raise NumericalError("no points to extrapolate")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    perm = np.argsort(x, kind="stable")
    x, y = x[perm], y[perm]
    degree = 1 if method == "linear" else order
    needed = 3 if method == "exponential" else degree + 1
    distinct = np.unique(x).size
    if distinct < needed:
        raise NumericalError(f"{method} fit needs {needed} distinct scales, got {distinct}")

    if method == "exponential":
        if np.ptp(y) == 0.0:
            estimate, fitted = float(y[0]), y
        else:
            p0 = (float(y[-1]), float(y[0] - y[-1]), 0.1)
            try:
                popt, _ = curve_fit(_exp_decay, x, y, p0=p0, maxfev=10000)
            except RuntimeError as exc:
                raise NumericalError(f"exponential ZNE fit did not converge: {exc}") from exc
            estimate = float(_exp_decay(0.0, *popt))
            fitted = _exp_decay(x, *popt)
    else:
        coeffs = np.polyfit(x, y, degree)
        estimate = float(np.polyval(coeffs, 0.0))
        fitted = np.polyval(coeffs, x)
    residual = float(np.sqrt(np.mean((fitted - y) ** 2)))
    return ZNEResult(list(map(float, x)), list(map(float, y)), estimate, residual, method)


# readout


@dataclass(frozen=True)
class ReadoutCorrection:
    probabilities: Tuple[float, float]
    clipped: bool


class ConfusionMatrix:
    """Single-qubit readout model, ``m[i][j] = P(measured j | prepared i)``."""

    def __init__(self, m: Sequence[Sequence[float]]) -> None:
        arr = np.asarray(m, dtype=float)
        if arr.shape != (2, 2):
            raise ConfigError(f"confusion matrix must be 2x2, got shape {arr.shape}")
        if np.any(arr < 0) or not np.allclose(arr.sum(axis=1), 1.0, atol=1e-12):
            raise ConfigError("confusion matrix rows must be probability distributions")
        self.m = arr

    @classmethod
    def identity(cls) -> "ConfusionMatrix":
        return cls(np.eye(2))

    @classmethod
    def symmetric(cls, flip: float) -> "ConfusionMatrix":
        return cls([[1 - flip, flip], [flip, 1 - flip]])

    @classmethod
    def from_error_rates(cls, p01: float, p10: float) -> "ConfusionMatrix":
        """p01 = P(read 1 | prepared 0), p10 = P(read 0 | prepared 1)."""
        return cls([[1 - p01, p01], [p10, 1 - p10]])

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.m))

    def mix(self, p_true: Sequence[float]) -> np.ndarray:
        """Expected measured distribution for a true distribution."""
        return self.m.T @ np.asarray(p_true, dtype=float)


def correct_readout(m: ConfusionMatrix, p_exp: Sequence[float]) -> ReadoutCorrection:
    if abs(m.determinant) < SINGULAR_TOL:
        raise NumericalError(f"confusion matrix is singular (det = {m.determinant:.3e})")
    p = np.linalg.solve(m.m.T, np.asarray(p_exp, dtype=float))
    clipped = bool(np.any(p < 0.0) or np.any(p > 1.0))
    if clipped:
        p = np.clip(p, 0.0, 1.0)
        total = p.sum()
        p = p / total if total > 0 else np.array([0.5, 0.5])
        logger.debug("readout correction left the simplex; clipped to %s", p)
    return ReadoutCorrection((float(p[0]), float(p[1])), clipped)


def apply_readout_noise(m: ConfusionMatrix, counts: Tuple[int, int], seed: int) -> Tuple[int, int]:
    """Flip each recorded outcome independently with the matrix's conditional rates."""
    rng = np.random.default_rng(seed)
    n0, n1 = int(counts[0]), int(counts[1])
    if n0 < 0 or n1 < 0:
        raise ConfigError(f"counts must be non-negative, got {counts}")
    zero_to_one = int(rng.binomial(n0, m.m[0, 1]))
    one_to_zero = int(rng.binomial(n1, m.m[1, 0]))
    return n0 - zero_to_one + one_to_zero, n1 - one_to_zero + zero_to_one
