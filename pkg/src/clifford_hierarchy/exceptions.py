class HierarchyError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(HierarchyError, ValueError):
    """Operands act on different numbers of qubits."""


class ValidationError(HierarchyError, ValueError):
    """Input violates a structural precondition (e.g. not unitary)."""


class CapabilityError(HierarchyError, ValueError):
    """Requested size is outside what the routine supports."""


class ResourceCapError(HierarchyError, RuntimeError):
    """A state or step budget was exhausted before the computation finished."""

    def __init__(self, message, partial_size=None):
        super().__init__(message)
        self.partial_size = partial_size


class SchemeInapplicableError(HierarchyError, ValueError):
    """One-bit teleportation was requested for a gate that is not semi-Clifford."""


class ParseError(HierarchyError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
