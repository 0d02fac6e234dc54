"""Exception types shared across the package."""


class HampartError(Exception):
    """Base class for all package-specific errors."""


class MalformedInputError(HampartError, ValueError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BoundsError(HampartError, IndexError):
    """An index in an input file exceeds the declared dimensions."""


class SchemaError(HampartError, ValueError):
    """A serialized object does not match the expected schema/version."""


class ValidationError(HampartError, ValueError):
    """Tensor data violates a structural invariant."""


class InternalConsistencyError(HampartError, RuntimeError):
    """A derived quantity violated a property the algorithm relies on."""


class ResourceLimitError(HampartError, RuntimeError):
    """A configured cap (qubits, memory) would be exceeded."""


class ConvergenceError(HampartError, RuntimeError):
    """An iterative solver failed to converge; carries the residual norm."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EmptySectorError(HampartError, ValueError):
    """The requested symmetry sector contains no states."""
