"""Run configuration: one validated pydantic tree per CLI invocation.

Defaults come from the model fields, then environment (PQSIM_*), then the
config file, then CLI flags.
"""
import os
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, PositiveInt, model_validator

from .errors import ConfigError
from .sim.hamiltonian import HubbardParams, LatticeSpec
from .sim.mitigation import ConfusionMatrix, NoiseModel, ZNEMethod
from .sim.ramsey import RamseyConfig, uniform_grid
from .sim.spectroscopy import SignalSource, Window
from .sim.trotter import DEFAULT_N_STEPS, TermOrdering
from .sim.vqe import SPSAConfig

OutputFormat = Literal["csv", "json"]


@dataclass
class EnvDefaults:
    out_dir: str = "out"
    threads: int = 1
    log_level: str = "INFO"

    @classmethod
    def load(cls) -> "EnvDefaults":
        """Read PQSIM_* variables; call after load_dotenv()."""
        raw = os.getenv("PQSIM_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f"PQSIM_THREADS must be an integer, got {raw!r}") from None
        return cls(
            out_dir=os.getenv("PQSIM_OUT_DIR", "out"),
            threads=threads,
            log_level=os.getenv("PQSIM_LOG_LEVEL", "INFO"),
        )


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class ModelBlock(_Block):
    bath_sites: PositiveInt = Field(2, alias="L")
    spinful: bool = False
    impurity_present: bool = True
    J: PositiveFloat = 1.0
    U_ff: float = 0.0
    U_imp: float = 2.5
    eps: Optional[Tuple[float, ...]] = None
    hopping_sign: Literal[-1, 1] = -1
    impurity_coupling: Literal["uniform", "local"] = "uniform"
    impurity_site: int = Field(0, ge=0)

    def lattice(self) -> LatticeSpec:
        return LatticeSpec(bath_sites=self.bath_sites, spinful=self.spinful, impurity_present=self.impurity_present)

    def params(self) -> HubbardParams:
        return HubbardParams(
            J=self.J,
            eps=self.eps,
            U_ff=self.U_ff,
            U_imp=self.U_imp,
            hopping_sign=self.hopping_sign,
            impurity_coupling=self.impurity_coupling,
            impurity_site=self.impurity_site,
        )


class ProtocolBlock(_Block):
    t_max: NonNegativeFloat = 4.0
    dt: PositiveFloat = 0.5
    time_grid: Optional[Tuple[float, ...]] = None
    n_steps: PositiveInt = DEFAULT_N_STEPS
    ordering: TermOrdering = "kinetic_first"
    shots: Optional[PositiveInt] = 1000
    measure_imaginary: bool = False
    occupation: Optional[Tuple[int, ...]] = None

    def times(self) -> Tuple[float, ...]:
        return self.time_grid if self.time_grid is not None else uniform_grid(self.t_max, self.dt)


class SpectrumBlock(_Block):
    t_max: PositiveFloat = 20.0
    dt: PositiveFloat = 0.1
    window: Window = "hann"
    zero_pad_factor: PositiveInt = 8
    source: SignalSource = "ed"
    u_start: PositiveFloat = 0.1
    u_stop: PositiveFloat = 5.0
    u_step: PositiveFloat = 0.1
    u_min: float = 3.0
    search_min: Optional[float] = None
    search_max: Optional[float] = None

    def u_grid(self) -> Tuple[float, ...]:
        n = int(round((self.u_stop - self.u_start) / self.u_step))
        return tuple(round(self.u_start + k * self.u_step, 10) for k in range(n + 1))

    def search_range(self) -> Optional[Tuple[float, float]]:
        if self.search_min is None and self.search_max is None:
            return None
        lo = self.search_min if self.search_min is not None else float("-inf")
        hi = self.search_max if self.search_max is not None else float("inf")
        return lo, hi


class NoiseBlock(_Block):
    p1: float = Field(0.001, ge=0, lt=1)
    p2: float = Field(0.01, ge=0, lt=1)
    readout_p01: float = Field(0.02, ge=0, le=1)
    readout_p10: float = Field(0.05, ge=0, le=1)
    scales: Tuple[PositiveInt, ...] = (1, 3, 5)
    zne_method: ZNEMethod = "poly"
    zne_order: PositiveInt = 2
    t: NonNegativeFloat = 2.5
    n_steps: PositiveInt = 1
    shots: PositiveInt = 4000

    def noise_model(self, seed: int) -> NoiseModel:
        return NoiseModel(depolarizing_p1=self.p1, depolarizing_p2=self.p2, seed=seed)

    def confusion(self) -> ConfusionMatrix:
        return ConfusionMatrix.from_error_rates(self.readout_p01, self.readout_p10)


class VQEBlock(_Block):
    layers: PositiveInt = 2
    entangler: Literal["line", "ring"] = "line"
    iterations: PositiveInt = 300
    a: PositiveFloat = 0.2
    c: PositiveFloat = 0.1
    alpha: float = Field(0.602, gt=0, le=1)
    gamma: float = Field(0.101, gt=0, le=0.5)
    A: Optional[NonNegativeFloat] = None
    calibrate: bool = True
    shots: Optional[PositiveInt] = None
    use_occupation: bool = True

    def spsa(self, seed: int) -> SPSAConfig:
        return SPSAConfig(
            iterations=self.iterations,
            a=self.a,
            c=self.c,
            alpha=self.alpha,
            gamma=self.gamma,
            A=self.A,
            seed=seed,
            shots=self.shots,
            calibrate=self.calibrate,
        )


class TrotterScanBlock(_Block):
    """Overrides of the model block used only by the scan; None keeps the model value.

    Uniform coupling on a spinless bath commutes with the hopping, which makes
    every product formula exact, so the scan defaults to the local coupling.
    """

    steps: Tuple[PositiveInt, ...] = (1, 4, 8, 15, 16, 32, 64)
    slope_min_steps: PositiveInt = 4
    t_max: PositiveFloat = 4.0
    dt: PositiveFloat = 0.1
    J: Optional[PositiveFloat] = 0.6
    U_imp: Optional[float] = 1.5
    impurity_coupling: Optional[Literal["uniform", "local"]] = "local"


class CalibrationBlock(_Block):
    J: Tuple[PositiveFloat, ...] = (0.6, 1.0)
    U_imp: Tuple[float, ...] = (1.5, 2.5)
    couplings: Tuple[Literal["uniform", "local"], ...] = ("uniform", "local")
    hopping_signs: Tuple[Literal[-1, 1], ...] = (-1, 1)
    n_steps: Tuple[PositiveInt, ...] = (15, 200)


class RunConfig(_Block):
    model: ModelBlock = Field(default_factory=ModelBlock)
    protocol: ProtocolBlock = Field(default_factory=ProtocolBlock)
    spectrum: SpectrumBlock = Field(default_factory=SpectrumBlock)
    noise: NoiseBlock = Field(default_factory=NoiseBlock)
    vqe: VQEBlock = Field(default_factory=VQEBlock)
    trotter_scan: TrotterScanBlock = Field(default_factory=TrotterScanBlock)
    calibration: CalibrationBlock = Field(default_factory=CalibrationBlock)
    seed: int = 0
    threads: PositiveInt = Field(default_factory=lambda: EnvDefaults.load().threads)
    out_dir: str = Field(default_factory=lambda: EnvDefaults.load().out_dir)
    format: OutputFormat = "csv"

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        # surfaces eps/occupation length mismatches before any computation
        self.model.params().eps_for(self.model.lattice())
        self.ramsey_config()
        return self

    def ramsey_config(self, shots: Optional[int] = None, times: Optional[Tuple[float, ...]] = None, **updates) -> RamseyConfig:
        p = self.protocol
        base = RamseyConfig(
            lattice=self.model.lattice(),
            params=self.model.params(),
            initial_occupation=p.occupation,
            time_grid=times if times is not None else p.times(),
            n_steps=p.n_steps,
            ordering=p.ordering,
            shots=shots,
            seed=self.seed,
            measure_imaginary=p.measure_imaginary,
            threads=self.threads,
        )
        return base.model_copy(update=updates) if updates else base

    def with_model(self, **changes) -> "RunConfig":
        """Copy with model-block fields replaced; ``None`` values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        if not changes:
            return self
        return self.model_copy(update={"model": self.model.model_copy(update=changes)})
