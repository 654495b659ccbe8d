"""Exception types shared across the package."""


class WoplearnError(Exception):
    """Base class for all errors raised by this package."""


class InputError(WoplearnError):
    """Operands violate a precondition (mismatched windows, bad dimensions)."""


class SizeCapError(WoplearnError):
    """A window or function table would exceed the configured size cap."""


class ParseError(WoplearnError):
    """A serialized artifact (PBM file, config, parameter file) is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(WoplearnError):
    """A run configuration is incomplete or contains unknown keys."""
