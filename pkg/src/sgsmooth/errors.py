"""Exception types shared across the package."""


class StreamExhausted(RuntimeError):
    """Sample stream ended before the configured iteration count."""


class NumericError(ArithmeticError):
    """A computation produced or received a non-finite value."""


class UnsupportedConfiguration(ValueError):
    """Parameters fall outside the range an operation supports."""


class InsufficientData(ValueError):
    """Not enough usable points to form an estimate."""


class ParseError(ValueError):
    """Malformed text input; carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatError(ValueError):
    """Malformed or unsupported binary image file."""


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending key."""
