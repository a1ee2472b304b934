import sys
from pathlib import Path

import pytest

# Add the src directory to the Python path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from polaron_qsim.sim.hamiltonian import HubbardParams, LatticeSpec  # noqa: E402
from polaron_qsim.sim.ramsey import RamseyConfig  # noqa: E402


@pytest.fixture
def default_config() -> RamseyConfig:
    """L = 2 spinless bath, uniform coupling, J = 1, U_imp = 2.5, occupation [1, 1, 0]."""
    return RamseyConfig(lattice=LatticeSpec(bath_sites=2), params=HubbardParams(J=1.0, U_imp=2.5))


@pytest.fixture
def local_config() -> RamseyConfig:
    """Impurity coupled to bath site 0 only; the product formula is no longer exact here."""
    return RamseyConfig(
        lattice=LatticeSpec(bath_sites=2),
        params=HubbardParams(J=1.0, U_imp=2.5, impurity_coupling="local"),
    )
