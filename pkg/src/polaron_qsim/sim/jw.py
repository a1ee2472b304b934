"""Jordan-Wigner mapping and the Pauli-string algebra built on it.

Conventions used project-wide:

* ``letters[q]`` is the Pauli letter acting on qubit ``q``;
* qubit 0 is the least-significant bit of a computational-basis index;
* ``c_j^dagger = (X_j - i Y_j)/2 * prod_{k<j} Z_k``.
"""
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Iterator, Tuple

import numpy as np

from ..errors import CapacityError, ConfigError
from .hamiltonian import FermionHamiltonian, FermionTerm

PRUNE_TOL = 1e-12
MAX_DENSE_QUBITS = 14
MAX_MODE_MATRIX = 8

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# single-qubit products: (a, b) -> (phase, letter) with a*b = phase * letter
_PRODUCT: Dict[Tuple[str, str], Tuple[complex, str]] = {}
for _a in "IXYZ":
    _PRODUCT[("I", _a)] = (1, _a)
    _PRODUCT[(_a, "I")] = (1, _a)
    _PRODUCT[(_a, _a)] = (1, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1j, _c)
    _PRODUCT[(_b, _a)] = (-1j, _c)


@dataclass(frozen=True)
class PauliString:
    coefficient: complex
    letters: str

    def __post_init__(self) -> None:
        if not self.letters or set(self.letters) - set("IXYZ"):
            raise ConfigError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @classmethod
    def identity(cls, n_qubits: int, coefficient: complex = 1.0) -> "PauliString":
        return cls(coefficient, "I" * n_qubits)

    @classmethod
    def from_sparse(cls, n_qubits: int, ops: Dict[int, str], coefficient: complex = 1.0) -> "PauliString":
        letters = ["I"] * n_qubits
        for q, p in ops.items():
            letters[q] = p
        return cls(coefficient, "".join(letters))

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(q for q, p in enumerate(self.letters) if p != "I")

    def symplectic(self) -> Tuple[np.ndarray, np.ndarray]:
        x = np.array([p in "XY" for p in self.letters], dtype=bool)
        z = np.array([p in "ZY" for p in self.letters], dtype=bool)
        return x, z

    def commutes_with(self, other: "PauliString") -> bool:
        x1, z1 = self.symplectic()
        x2, z2 = other.symplectic()
        return int(np.sum(x1 & z2) + np.sum(z1 & x2)) % 2 == 0

    def __mul__(self, other):
        if isinstance(other, PauliString):
            if other.n_qubits != self.n_qubits:
                raise ConfigError("Pauli strings act on different registers")
            phase: complex = 1
            out = []
            for a, b in zip(self.letters, other.letters):
                ph, c = _PRODUCT[(a, b)]
                phase *= ph
                out.append(c)
            return PauliString(self.coefficient * other.coefficient * phase, "".join(out))
        return PauliString(self.coefficient * complex(other), self.letters)

    __rmul__ = __mul__

    def embed(self, n_total: int, offset: int) -> "PauliString":
        if offset < 0 or offset + self.n_qubits > n_total:
            raise ConfigError(f"cannot embed {self.n_qubits} qubits at offset {offset} in {n_total}")
        return PauliString(
            self.coefficient, "I" * offset + self.letters + "I" * (n_total - offset - self.n_qubits)
        )

    def __str__(self) -> str:
        return f"{self.coefficient} * {self.letters}"


@dataclass(frozen=True)
class PauliHamiltonian:
    n_qubits: int
    terms: Tuple[PauliString, ...] = ()

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[PauliString]) -> "PauliHamiltonian":
        """Merge like letter patterns and prune coefficients below 1e-12."""
        merged: Dict[str, complex] = {}
        for t in terms:
            if t.n_qubits != n_qubits:
                raise ConfigError(f"term {t} does not act on {n_qubits} qubits")
            merged[t.letters] = merged.get(t.letters, 0j) + t.coefficient
        kept = []
        for letters, c in merged.items():
            if abs(c) < PRUNE_TOL:
                continue
            if abs(c.imag) < PRUNE_TOL:
                c = complex(c.real, 0.0)
            kept.append(PauliString(c, letters))
        return cls(n_qubits, tuple(kept))

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliHamiltonian") -> "PauliHamiltonian":
        return PauliHamiltonian.from_terms(self.n_qubits, self.terms + other.terms)

    def scaled(self, factor: float) -> "PauliHamiltonian":
        return PauliHamiltonian.from_terms(self.n_qubits, (t * factor for t in self.terms))

    def embed(self, n_total: int, offset: int) -> "PauliHamiltonian":
        return PauliHamiltonian(n_total, tuple(t.embed(n_total, offset) for t in self.terms))

    @property
    def identity_coefficient(self) -> float:
        return float(sum(t.coefficient.real for t in self.terms if t.is_identity))

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        return all(abs(t.coefficient.imag) <= tol for t in self.terms)

    def coefficients(self) -> Dict[str, complex]:
        return {t.letters: t.coefficient for t in self.terms}

    def render(self) -> str:
        return "\n".join(str(t) for t in self.terms)


def _ladder(mode: int, dagger: bool, n: int) -> list[PauliString]:
    tail = {k: "Z" for k in range(mode)}
    sign = -1 if dagger else 1
    return [
        PauliString.from_sparse(n, {**tail, mode: "X"}, 0.5),
        PauliString.from_sparse(n, {**tail, mode: "Y"}, 0.5j * sign),
    ]


def _product(a: list[PauliString], b: list[PauliString]) -> list[PauliString]:
    return [x * y for x in a for y in b]


def _number(mode: int, n: int, coefficient: float) -> list[PauliString]:
    return [
        PauliString.identity(n, coefficient / 2),
        PauliString.from_sparse(n, {mode: "Z"}, -coefficient / 2),
    ]


def _map_term(term: FermionTerm, n: int) -> list[PauliString]:
    c = term.coefficient
    if term.kind == "number":
        return _number(term.modes[0], n, c)
    if term.kind == "density_density":
        i, j = term.modes
        # U n_i n_j = U/4 (I - Z_i - Z_j + Z_i Z_j)
        return [
            PauliString.identity(n, c / 4),
            PauliString.from_sparse(n, {i: "Z"}, -c / 4),
            PauliString.from_sparse(n, {j: "Z"}, -c / 4),
            PauliString.from_sparse(n, {i: "Z", j: "Z"}, c / 4),
        ]
    i, j = term.modes
    forward = _product(_ladder(i, True, n), _ladder(j, False, n))
    backward = _product(_ladder(j, True, n), _ladder(i, False, n))
    return [p * c for p in forward + backward]


def jordan_wigner_terms(h: FermionHamiltonian) -> list[PauliString]:
    """Term-by-term JW image without merging."""
    out: list[PauliString] = []
    for term in h.terms:
        out.extend(_map_term(term, h.n_modes))
    return out


def jordan_wigner(h: FermionHamiltonian) -> PauliHamiltonian:
    if h.n_modes < 1:
        return PauliHamiltonian(max(h.n_modes, 0))
    return PauliHamiltonian.from_terms(h.n_modes, jordan_wigner_terms(h))


def _check_dense(n: int, limit: int = MAX_DENSE_QUBITS) -> None:
    if n > limit:
        raise CapacityError(f"dense matrix on {n} qubits exceeds the {limit}-qubit limit")


def pauli_to_matrix(p: PauliString) -> np.ndarray:
    """Dense image with qubit 0 as the least-significant index bit."""
    _check_dense(p.n_qubits)
    mats = [_PAULI[letter] for letter in reversed(p.letters)]
    return p.coefficient * reduce(np.kron, mats)


def mode_operator_matrix(mode: int, dagger: bool, n_modes: int) -> np.ndarray:
    _check_dense(n_modes, MAX_MODE_MATRIX)
    if not 0 <= mode < n_modes:
        raise ConfigError(f"mode {mode} out of range for {n_modes} modes")
    return sum(pauli_to_matrix(p) for p in _ladder(mode, dagger, n_modes))
