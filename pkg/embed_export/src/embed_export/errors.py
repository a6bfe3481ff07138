"""Typed failures with fixed process exit codes."""


class ExportError(Exception):
    """Base class; carries the exit code the CLI maps it to."""

    exit_code = 2


class InputError(ExportError):
    """Malformed or empty meeting file, or an output row mismatch."""

    exit_code = 2


class EncoderError(ExportError):
    """The encoder identifier could not be resolved or loaded."""

    exit_code = 3
