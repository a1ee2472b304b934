"""Ancilla Ramsey interferometry: S(t) = <Psi0| exp(iH0 t) exp(-iHt) |Psi0>.

Ancilla is qubit 0; system mode k sits on qubit k + 1.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import pi
from typing import Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator, model_validator

from ..errors import ConfigError
from .circuit import Gate, QuantumCircuit, StateVector, measure_qubit, run_circuit
from .hamiltonian import HubbardParams, LatticeSpec, build_bath_hamiltonian, build_hamiltonian
from .jw import PauliHamiltonian, jordan_wigner
from .trotter import DEFAULT_N_STEPS, TermOrdering, TrotterPlan, controlled_trotter

logger = logging.getLogger("polaron_qsim.ramsey")

ANCILLA = 0
RE_CHANNEL = 0
IM_CHANNEL = 1

SignalMode = Literal["exact", "shots", "noisy", "ed"]

# (t, P0, P1, S) as printed for the ideal 4-qubit run
IDEAL_REFERENCE: Tuple[Tuple[float, float, float, float], ...] = (
    (0.00, 1.000, 0.000, 1.000),
    (0.50, 0.833, 0.167, 0.666),
    (1.00, 0.523, 0.477, 0.046),
    (1.50, 0.408, 0.592, -0.184),
    (2.00, 0.564, 0.436, 0.127),
    (2.50, 0.716, 0.284, 0.432),
    (3.00, 0.588, 0.412, 0.175),
    (3.50, 0.248, 0.752, -0.505),
    (4.00, 0.036, 0.964, -0.928),
)

# same grid, hardware run with N = 1000 shots
HARDWARE_REFERENCE: Tuple[Tuple[float, float, float, float], ...] = (
    (0.00, 1.000, 0.000, 1.000),
    (0.50, 0.827, 0.173, 0.654),
    (1.00, 0.497, 0.503, -0.006),
    (1.50, 0.417, 0.583, -0.166),
    (2.00, 0.558, 0.442, 0.116),
    (2.50, 0.716, 0.284, 0.432),
    (3.00, 0.354, 0.646, -0.292),
    (3.50, 0.252, 0.748, -0.496),
    (4.00, 0.039, 0.961, -0.922),
)


def uniform_grid(t_max: float, dt: float) -> Tuple[float, ...]:
    if dt <= 0 or t_max < 0:
        raise ConfigError(f"need dt > 0 and t_max >= 0, got dt={dt}, t_max={t_max}")
    n = int(round(t_max / dt))
    return tuple(float(t) for t in np.linspace(0.0, n * dt, n + 1))


def default_occupation(lattice: LatticeSpec) -> Tuple[int, ...]:
    """Impurity filled, bath filled from the lowest mode up to half of the bath modes."""
    bits = [0] * lattice.n_modes
    bath_modes = [m for m in range(lattice.n_modes) if not (lattice.impurity_present and m == 0)]
    if lattice.impurity_present:
        bits[0] = 1
    for m in bath_modes[: max(1, len(bath_modes) // 2)]:
        bits[m] = 1
    return tuple(bits)


class RamseyConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lattice: LatticeSpec = Field(default_factory=LatticeSpec)
    params: HubbardParams = Field(default_factory=HubbardParams)
    initial_occupation: Optional[Tuple[int, ...]] = None
    time_grid: Tuple[float, ...] = Field(default_factory=lambda: uniform_grid(4.0, 0.5))
    n_steps: PositiveInt = DEFAULT_N_STEPS
    ordering: TermOrdering = "kinetic_first"
    shots: Optional[PositiveInt] = None
    seed: int = 0
    measure_imaginary: bool = False
    threads: PositiveInt = 1

    @field_validator("time_grid")
    @classmethod
    def _ascending(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not v:
            raise ValueError("time_grid must not be empty")
        if v[0] < 0:
            raise ValueError("time_grid must start at t >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("time_grid must be strictly ascending")
        return v

    @field_validator("initial_occupation")
    @classmethod
    def _bits(cls, v):
        if v is not None and any(b not in (0, 1) for b in v):
            raise ValueError("initial_occupation must be a 0/1 pattern")
        return v

    @model_validator(mode="after")
    def _occupation_length(self) -> "RamseyConfig":
        if self.initial_occupation is not None and len(self.initial_occupation) != self.lattice.n_modes:
            raise ValueError(
                f"initial_occupation has {len(self.initial_occupation)} bits, "
                f"lattice has {self.lattice.n_modes} modes"
            )
        return self

    def occupation(self) -> Tuple[int, ...]:
        if self.initial_occupation is not None:
            return self.initial_occupation
        return default_occupation(self.lattice)

    @property
    def n_qubits(self) -> int:
        return self.lattice.n_modes + 1


@dataclass(frozen=True)
class RamseySignal:
    times: np.ndarray
    re_s: np.ndarray
    p0: np.ndarray
    p1: np.ndarray
    im_s: Optional[np.ndarray] = None
    mode: SignalMode = "exact"
    shots: Optional[int] = None

    @classmethod
    def from_complex(cls, times: Sequence[float], s: np.ndarray, provenance: SignalMode = "ed") -> "RamseySignal":
        s = np.asarray(s, dtype=complex)
        re = s.real.copy()
        return cls(
            times=np.asarray(times, dtype=float),
            re_s=re,
            p0=(1.0 + re) / 2.0,
            p1=(1.0 - re) / 2.0,
            im_s=s.imag.copy(),
            mode=provenance,
        )

    @property
    def provenance(self) -> str:
        return f"shots({self.shots})" if self.shots else self.mode

    def complex_signal(self) -> np.ndarray:
        if self.im_s is None:
            return self.re_s.astype(complex)
        return self.re_s + 1j * self.im_s

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [
            (float(t), float(a), float(b), float(s))
            for t, a, b, s in zip(self.times, self.p0, self.p1, self.re_s)
        ]


def system_hamiltonians(config: RamseyConfig) -> Tuple[PauliHamiltonian, PauliHamiltonian]:
    """(H, H0) on the system register, sharing one mode layout."""
    h = jordan_wigner(build_hamiltonian(config.lattice, config.params))
    h0 = jordan_wigner(build_bath_hamiltonian(config.lattice, config.params))
    return h, h0


def ramsey_circuit_for(
    h: PauliHamiltonian,
    h0: PauliHamiltonian,
    occupation: Sequence[int],
    t: float,
    n_steps: int = DEFAULT_N_STEPS,
    imaginary: bool = False,
    ordering: TermOrdering = "kinetic_first",
) -> QuantumCircuit:
    if h.n_qubits != h0.n_qubits or len(occupation) != h.n_qubits:
        raise ConfigError("H, H0 and the occupation pattern must share one register")
    if t < 0:
        raise ConfigError(f"t must be >= 0, got {t}")
    n = h.n_qubits + 1
    gates = [Gate.x(k + 1) for k, b in enumerate(occupation) if b]
    gates.append(Gate.h(ANCILLA))
    if t > 0:
        ref = TrotterPlan(h0, t, n_steps, ordering, qubit_offset=1, register_size=n)
        full = TrotterPlan(h, t, n_steps, ordering, qubit_offset=1, register_size=n)
        gates.extend(controlled_trotter(ref, ANCILLA, 0).gates)
        gates.extend(controlled_trotter(full, ANCILLA, 1).gates)
    if imaginary:
        gates.append(Gate.phase(ANCILLA, -pi / 2))
    gates.append(Gate.h(ANCILLA))
    return QuantumCircuit(n, tuple(gates))


def build_ramsey_circuit(config: RamseyConfig, t: float, imaginary: bool = False) -> QuantumCircuit:
    h, h0 = system_hamiltonians(config)
    return ramsey_circuit_for(h, h0, config.occupation(), t, config.n_steps, imaginary, config.ordering)


def point_seed(seed: int, index: int, channel: int) -> int:
    return int(np.random.SeedSequence([seed, index, channel]).generate_state(1)[0])


def _read_ancilla(state: StateVector, shots: Optional[int], seed: int) -> Tuple[float, float]:
    if shots is None:
        p1 = min(max(state.probability_one(ANCILLA), 0.0), 1.0)
        return 1.0 - p1, p1
    c0, c1 = measure_qubit(state, ANCILLA, shots, seed)
    return c0 / shots, c1 / shots


def circuit_signal_for(
    h: PauliHamiltonian,
    h0: PauliHamiltonian,
    occupation: Sequence[int],
    times: Sequence[float],
    n_steps: int = DEFAULT_N_STEPS,
    shots: Optional[int] = None,
    seed: int = 0,
    measure_imaginary: bool = False,
    threads: int = 1,
    ordering: TermOrdering = "kinetic_first",
) -> RamseySignal:
    """Run the Ramsey circuit at every time point, in parallel when threads > 1."""

    def point(item: Tuple[int, float]) -> Tuple[float, float, Optional[float]]:
        i, t = item
        state = run_circuit(ramsey_circuit_for(h, h0, occupation, t, n_steps, False, ordering))
        p0, p1 = _read_ancilla(state, shots, point_seed(seed, i, RE_CHANNEL))
        im = None
        if measure_imaginary:
            state_im = run_circuit(ramsey_circuit_for(h, h0, occupation, t, n_steps, True, ordering))
            q0, q1 = _read_ancilla(state_im, shots, point_seed(seed, i, IM_CHANNEL))
            im = q0 - q1
        return p0, p1, im

    items = list(enumerate(float(t) for t in times))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, items))
    else:
        results = [point(it) for it in items]

    p0 = np.array([r[0] for r in results])
    p1 = np.array([r[1] for r in results])
    im_s = np.array([r[2] for r in results]) if measure_imaginary else None
    logger.debug("ramsey signal: %d points, shots=%s, threads=%d", len(items), shots, threads)
    return RamseySignal(
        times=np.asarray([t for _, t in items], dtype=float),
        re_s=p0 - p1,
        p0=p0,
        p1=p1,
        im_s=im_s,
        mode="shots" if shots else "exact",
        shots=shots,
    )


def measure_signal(config: RamseyConfig) -> RamseySignal:
    h, h0 = system_hamiltonians(config)
    return circuit_signal_for(
        h,
        h0,
        config.occupation(),
        config.time_grid,
        n_steps=config.n_steps,
        shots=config.shots,
        seed=config.seed,
        measure_imaginary=config.measure_imaginary,
        threads=config.threads,
        ordering=config.ordering,
    )


def fidelity_r2(signal: RamseySignal, exact: RamseySignal) -> float:
    """Coefficient of determination of signal.re_s against exact.re_s.

    A constant reference curve has no variance to explain; the result is nan then.
    """
    if signal.times.shape != exact.times.shape or not np.allclose(signal.times, exact.times, atol=1e-12):
        raise ConfigError("fidelity_r2 needs identical time grids")
    y = exact.re_s
    ss_res = float(np.sum((signal.re_s - y) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        logger.warning("R^2 undefined for a constant reference signal")
        return float("nan")
    return 1.0 - ss_res / ss_tot


def table_residual(signal: RamseySignal, table: Sequence[Tuple[float, float, float, float]] = IDEAL_REFERENCE) -> float:
    """Max |S - S_table| on the table's time points; signal must contain them."""
    worst = 0.0
    for t, _, _, s_ref in table:
        hits = np.flatnonzero(np.isclose(signal.times, t, atol=1e-9))
        if hits.size == 0:
            raise ConfigError(f"signal has no sample at t={t}")
        worst = max(worst, abs(float(signal.re_s[hits[0]]) - s_ref))
    return worst
