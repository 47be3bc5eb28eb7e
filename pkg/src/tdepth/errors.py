"""Exception hierarchy shared by every pass."""


class TDepthError(Exception):
    """Base class for all errors raised by this package."""


class CircuitError(TDepthError, ValueError):
    """Structural problem: mismatched lengths, bad indices, empty qubit register."""


class MergeError(TDepthError, ValueError):
    """Raised when merging two columns that cannot be merged."""

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or f"columns cannot be merged: {reason.name}")


class PlanError(TDepthError, ValueError):
    """A merge plan reuses a column index or points outside the circuit."""


class CommutationError(PlanError):
    """A strict-order merge would move a column past one it does not commute with."""

    def __init__(self, pair, blocking, message=None):
        self.pair = pair
        self.blocking = blocking
        super().__init__(
            message or f"pair {pair}: column {pair[1]} does not commute with {blocking}"
        )


class DegenerateInputError(TDepthError, ValueError):
    pass


class CapacityError(TDepthError, ValueError):
    """Dense unitary requested for too many qubits."""


class SearchLimitError(TDepthError, ValueError):
    """Exhaustive search refused because the instance exceeds the configured limit."""


class DocumentError(TDepthError, ValueError):
    """Malformed circuit document; ``location`` points at the offending element."""

    def __init__(self, message, location=""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class VersionError(DocumentError):
    pass


class ConfigError(TDepthError, ValueError):
    """Invalid configuration file, environment override or flag value."""
