"""Discretized impurity-Hubbard Hamiltonian in second quantization.

Mode layout is fixed: impurity first (when present), then bath sites in
ascending order, spin-up before spin-down on each site when the bath is spinful.
"""
from dataclasses import dataclass, field
from typing import Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

from ..errors import ConfigError, DivergenceError

TermKind = Literal["hop", "number", "density_density"]

REGULARIZATION_CONSTANT = 0.243


class LatticeSpec(BaseModel):
    """Open 1D chain of bath sites, optionally spinful, plus an impurity mode."""

    model_config = ConfigDict(frozen=True)

    bath_sites: PositiveInt = 2
    spinful: bool = False
    impurity_present: bool = True

    @property
    def spin_species(self) -> int:
        return 2 if self.spinful else 1

    @property
    def n_modes(self) -> int:
        return self.bath_sites * self.spin_species + (1 if self.impurity_present else 0)

    @property
    def adjacency(self) -> list[tuple[int, int]]:
        return [(i, i + 1) for i in range(self.bath_sites - 1)]

    def bath_mode(self, site: int, spin: int = 0) -> int:
        offset = 1 if self.impurity_present else 0
        return offset + site * self.spin_species + spin

    def layout(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        if self.impurity_present:
            out["imp"] = 0
        for site in range(self.bath_sites):
            if self.spinful:
                out[f"bath{site}_up"] = self.bath_mode(site, 0)
                out[f"bath{site}_dn"] = self.bath_mode(site, 1)
            else:
                out[f"bath{site}"] = self.bath_mode(site)
        return out


class HubbardParams(BaseModel):
    """Energies in units of the hopping J (J = 1 canonical)."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    hopping_j: float = Field(1.0, alias="J", gt=0)
    onsite_eps: Optional[Tuple[float, ...]] = Field(None, alias="eps")
    u_ff: float = Field(0.0, alias="U_ff")
    u_imp: float = Field(0.0, alias="U_imp")
    hopping_sign: Literal[-1, 1] = -1
    impurity_coupling: Literal["uniform", "local"] = "uniform"
    impurity_site: int = Field(0, ge=0)

    @field_validator("onsite_eps", mode="before")
    @classmethod
    def _tuple_eps(cls, v):
        return tuple(v) if v is not None else None

    def eps_for(self, lattice: LatticeSpec) -> Tuple[float, ...]:
        if self.onsite_eps is None:
            return (0.0,) * lattice.bath_sites
        if len(self.onsite_eps) != lattice.bath_sites:
            raise ConfigError(
                f"onsite_eps has {len(self.onsite_eps)} entries, lattice has {lattice.bath_sites} sites"
            )
        return self.onsite_eps


@dataclass(frozen=True)
class FermionTerm:
    """`hop` stores i<j with the Hermitian conjugate implied."""

    coefficient: float
    kind: TermKind
    modes: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind == "number" and len(self.modes) != 1:
            raise ConfigError(f"number term needs one mode, got {self.modes}")
        if self.kind in ("hop", "density_density"):
            if len(self.modes) != 2 or self.modes[0] == self.modes[1]:
                raise ConfigError(f"{self.kind} term needs two distinct modes, got {self.modes}")
        if self.kind == "hop" and self.modes[0] > self.modes[1]:
            object.__setattr__(self, "modes", (self.modes[1], self.modes[0]))

    def touches(self, mode: int) -> bool:
        return mode in self.modes


@dataclass(frozen=True)
class FermionHamiltonian:
    terms: Tuple[FermionTerm, ...]
    layout: Dict[str, int] = field(default_factory=dict)
    n_modes: int = 0

    def of_kind(self, kind: TermKind) -> Tuple[FermionTerm, ...]:
        return tuple(t for t in self.terms if t.kind == kind)


def _impurity_terms(lattice: LatticeSpec, params: HubbardParams) -> list[FermionTerm]:
    if not lattice.impurity_present or params.u_imp == 0.0:
        return []
    if params.impurity_coupling == "local":
        if params.impurity_site >= lattice.bath_sites:
            raise ConfigError(
                f"impurity_site {params.impurity_site} outside a {lattice.bath_sites}-site bath"
            )
        sites = [params.impurity_site]
    else:
        sites = list(range(lattice.bath_sites))
    return [
        FermionTerm(params.u_imp, "density_density", (0, lattice.bath_mode(site, spin)))
        for site in sites
        for spin in range(lattice.spin_species)
    ]


def _bath_terms(lattice: LatticeSpec, params: HubbardParams) -> list[FermionTerm]:
    eps = params.eps_for(lattice)
    terms: list[FermionTerm] = []
    hop = params.hopping_sign * params.hopping_j
    for spin in range(lattice.spin_species):
        for i, j in lattice.adjacency:
            terms.append(FermionTerm(hop, "hop", (lattice.bath_mode(i, spin), lattice.bath_mode(j, spin))))
    for site, e in enumerate(eps):
        if e == 0.0:
            continue
        for spin in range(lattice.spin_species):
            terms.append(FermionTerm(e, "number", (lattice.bath_mode(site, spin),)))
    if lattice.spinful and params.u_ff != 0.0:
        for site in range(lattice.bath_sites):
            terms.append(
                FermionTerm(
                    params.u_ff,
                    "density_density",
                    (lattice.bath_mode(site, 0), lattice.bath_mode(site, 1)),
                )
            )
    return terms


def build_hamiltonian(lattice: LatticeSpec, params: HubbardParams) -> FermionHamiltonian:
    terms = _bath_terms(lattice, params) + _impurity_terms(lattice, params)
    return FermionHamiltonian(tuple(terms), lattice.layout(), lattice.n_modes)


def build_bath_hamiltonian(lattice: LatticeSpec, params: HubbardParams) -> FermionHamiltonian:
    """Reference H0: same register, impurity interaction switched off."""
    return build_hamiltonian(lattice, params.model_copy(update={"u_imp": 0.0}))


def regularize_coupling(
    g_eff: float, lattice_spacing: float = 1.0, mass: float = 1.0, hbar: float = 1.0
) -> float:
    """Lattice U from a continuum coupling: 1/U = 1/g_eff - R, R = 0.243 m / (hbar^2 b)."""
    if g_eff == 0.0:
        raise ConfigError("g_eff must be non-zero")
    if lattice_spacing <= 0 or mass <= 0 or hbar <= 0:
        raise ConfigError("lattice_spacing, mass and hbar must be positive")
    r = REGULARIZATION_CONSTANT * mass / (hbar**2 * lattice_spacing)
    inv_u = 1.0 / g_eff - r
    if abs(inv_u) <= 1e-12 * max(1.0, abs(r)):
        raise DivergenceError(f"1/g_eff equals R = {r:.6g}: unitary point, U diverges")
    return 1.0 / inv_u
