"""Exception types shared across the package."""


class GraphsummError(Exception):
    """Base class for all package errors."""


class ParseError(GraphsummError):
    """A file could not be parsed. Carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AlignmentError(GraphsummError):
    """Two artifacts that must agree on node counts do not."""


class DataError(GraphsummError):
    """A value is out of its documented domain (non-finite, NaN, ...)."""


class ShapeError(GraphsummError):
    """Tensor or matrix shapes are incompatible for an operation."""


class ContractError(GraphsummError):
    """A caller violated an operation's precondition."""
