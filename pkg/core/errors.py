"""
Exceptions raised by the JetKit engine.

Every exception carries a stable machine-readable ``code`` that the CLI
surfaces unchanged in text and JSON reports.
"""


class JetKitError(Exception):
    """Base class for engine failures."""

    code = "engine_error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code:
            self.code = code


class CoordinateOutOfFrameError(JetKitError):
    """Raised when an equation references a jet coordinate outside its frame."""

    code = "coordinate_out_of_frame"


class SingularTransformError(JetKitError):
    """Raised when a coordinate change matrix is not invertible."""

    code = "singular_transform"


class DimensionOverflowError(JetKitError):
    """Raised when a dimension count exceeds what the engine will allocate."""

    code = "dimension_overflow"


class NotInvolutiveError(JetKitError):
    """Raised when an operation needs an involutive system and did not get one."""

    code = "not_involutive"


class NotFormallyIntegrableError(JetKitError):
    """Raised when an operation needs a formally integrable system."""

    code = "not_formally_integrable"


class BudgetExhaustedError(JetKitError):
    """Raised when a bounded search runs out of steps."""

    code = "budget_exhausted"


class ConsistencyError(JetKitError):
    """Raised when two independent computations of the same number disagree."""

    code = "internal_consistency"


class OperationCancelled(JetKitError):
    """Raised when a long computation observes its cancel event."""

    code = "cancelled"


class DocumentError(JetKitError):
    """Raised when a system document cannot be parsed or resolved."""

    code = "parse_error"

    def __init__(self, message: str, code: str | None = None,
                 line: int | None = None, column: int | None = None):
        super().__init__(message, code)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        base = super().__str__()
        if self.line is not None:
            return f"{base} (line {self.line}, column {self.column})"
        return base
