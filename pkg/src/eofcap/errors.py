"""Exception hierarchy shared by all modules.

The CLI maps each class onto a distinct exit code, so every failure the
toolkit can signal belongs to exactly one of these.
"""


class EofcapError(Exception):
    """Base class for toolkit errors."""


class DimensionError(EofcapError, ValueError):
    """Operand shapes are incompatible."""


class NotHermitianError(EofcapError, ValueError):
    """Matrix deviates from its adjoint beyond tolerance."""


class NotPSDError(EofcapError, ValueError):
    """Matrix has an eigenvalue below the negativity tolerance."""


class InvalidStateError(EofcapError, ValueError):
    """Operator is not a valid density matrix or pure state."""


class InvalidChannelError(EofcapError, ValueError):
    """Kraus operators violate the completeness relation."""


class DecompositionError(EofcapError, RuntimeError):
    """Optimal pure-state decomposition failed its own invariants."""


class CertificationError(EofcapError, RuntimeError):
    """Capacity search did not reach a certified optimum."""
