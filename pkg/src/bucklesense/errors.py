"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
input/configuration problems (exit 1) and numerical failures (exit 2).
"""


class BucklesenseError(Exception):
    """Base class for all package errors."""


class InvalidInputError(BucklesenseError, ValueError):
    """Geometry, material or query values outside their valid domain."""


class ConfigError(BucklesenseError, ValueError):
    """A configuration key is missing, unknown or malformed."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class TraceParseError(BucklesenseError, ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class RangeError(InvalidInputError):
    """Interpolation query outside the tabulated range."""

    def __init__(self, value, nearest, message=None):
        self.value = value
        self.nearest = nearest
        super().__init__(message or f"query {value!r} outside curve range (nearest endpoint {nearest!r})")


class NumericalError(BucklesenseError, ArithmeticError):
    """Base class for solver and estimation failures."""


class NoBuckledSolutionError(NumericalError):
    """Shooting residual has no sign change over the slope bracket."""


class DivergenceError(NumericalError):
    """The terminal event never occurred before the arc-length cap."""


class IncompleteTrialError(NumericalError):
    def __init__(self, phase, message=None):
        self.phase = phase
        super().__init__(message or f"trial ended during phase {phase!r}")


class MissingContactSourceError(NumericalError):
    pass


class NoContactError(NumericalError):
    pass


class NoBucklingError(NumericalError):
    pass


class SingularIndentationError(NumericalError):
    pass
