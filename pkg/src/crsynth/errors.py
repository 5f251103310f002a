"""Exception types shared across the package."""


class CrsynthError(Exception):
    """Base class for all package errors."""


class ArgumentError(CrsynthError, ValueError):
    """An argument violates an operation's precondition."""


class RangeError(CrsynthError, ValueError):
    """A dimension or value is outside the supported range."""


class InternalError(CrsynthError):
    """An internal consistency check failed (indicates a bug in the caller)."""


class NumericalError(CrsynthError):
    """A cost or gradient evaluation produced a non-finite value."""

    def __init__(self, message: str, point=None):
        super().__init__(message)
        self.point = point


class ParseError(CrsynthError, ValueError):
    """Malformed input text (QASM or unitary file)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedError(ParseError):
    """Syntactically valid input using a construct outside the supported subset."""

    def __init__(self, message: str, line: int | None = None, construct: str | None = None):
        super().__init__(message, line)
        self.construct = construct


class ExportError(CrsynthError):
    """A circuit contains a gate that cannot be emitted in the QASM subset."""


class InitFailedError(CrsynthError):
    """Initial structure growth exhausted all cell counts without solving."""

    def __init__(self, message: str, circuit=None, params=None, f_best: float = float("inf")):
        super().__init__(message)
        self.circuit = circuit
        self.params = params
        self.f_best = f_best


class FinalizeError(CrsynthError):
    """The final optimization could not restore the acceptance cost."""

    def __init__(self, message: str, best_f: float = float("inf")):
        super().__init__(message)
        self.best_f = best_f


class SweepBuildError(CrsynthError):
    """A sweep-table row failed to reach the cost threshold."""

    def __init__(self, message: str, alpha: float | None = None):
        super().__init__(message)
        self.alpha = alpha


class SweepQueryError(CrsynthError):
    """A warm-started sweep query failed to reach the cost threshold."""


class TableMismatchError(CrsynthError):
    """A sweep table was built for a different circuit structure."""


class TableFormatError(CrsynthError, ValueError):
    """A sweep table file is malformed."""
