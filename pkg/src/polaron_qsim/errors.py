class PolaronSimError(Exception):
    """Base class for every error raised by polaron_qsim."""


class ConfigError(PolaronSimError, ValueError):
    """Inconsistent or malformed input (CLI exit code 1)."""


class NumericalError(PolaronSimError, ValueError):
    """A computation could not be carried out (CLI exit code 2)."""


class CapacityError(NumericalError):
    """Dense representation requested for a register that is too large."""


class DivergenceError(NumericalError):
    """Coupling regularization hit its pole (the unitary point)."""


class CompileError(NumericalError):
    """A Pauli term cannot be compiled into the Trotter gate alphabet."""
