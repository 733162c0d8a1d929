"""Exception hierarchy shared by the library and the command line."""


class RopelengthError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RopelengthError, ValueError):
    """Input lies outside the domain of an operation (coincident points, bad counts)."""


class SingularConfigurationError(RopelengthError, ArithmeticError):
    """A curve is singular for the requested quantity, e.g. two coincident vertices."""


class ResolutionError(RopelengthError, ValueError):
    """The polygon is too coarse for the requested geometric feature."""


class KnotFileError(RopelengthError, ValueError):
    """Malformed or invalid knot file.

    ``line`` and ``column`` are set for syntax errors.
    """

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedFeatureError(KnotFileError):
    """Valid file that asks for something not supported, such as an open curve."""
