"""Exception types shared across the package."""


class RewireError(Exception):
    """Base class for all package errors."""


class PauliParseError(RewireError, ValueError):
    """A Pauli string failed to parse; the message names the offending position."""


class DimensionError(RewireError, ValueError):
    """Operands have incompatible sizes."""


class SchemaError(RewireError, ValueError):
    """A code or schedule document violates its file schema."""


class ValidationFailure(RewireError, ValueError):
    """A code failed validation on load."""


class SynthesisError(RewireError, RuntimeError):
    """Observable synthesis or compilation could not proceed."""


class DistanceBudgetError(SynthesisError):
    """Distance-constrained search exhausted its candidate budget.

    Carries the best candidate found so the caller can report it.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EngineInvariantError(RewireError, RuntimeError):
    """An internal invariant of the rewiring engine was violated (a bug)."""
