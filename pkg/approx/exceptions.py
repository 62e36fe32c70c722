"""Error types shared by the numerical modules and the commands.

`exit_code` is what a management command returns when the error escapes:
1 for invalid input or configuration, 2 when the numbers themselves refuse
(truncation not certified, spectral route ill conditioned, target residual
unreachable).
"""

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


class ApproxError(Exception):
    exit_code = EXIT_INVALID


class DomainError(ApproxError, ValueError):
    """A numeric argument lies outside the operation's domain."""


class ConfigurationError(ApproxError):
    """Inputs are individually valid but do not fit together."""


class GeometryError(ConfigurationError):
    """A ball, window or sector does not have the required shape."""


class FormatError(ApproxError):
    """A data file could not be parsed."""

    def __init__(self, path, line, field, message):
        self.path = str(path)
        self.line = line
        self.field = field
        super().__init__(f"{self.path}:{line}: field '{field}': {message}")


class TruncationError(ApproxError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, message, suggested_radius=None):
        self.suggested_radius = suggested_radius
        super().__init__(message)


class IllConditionedError(ApproxError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, message, amplification=None):
        self.amplification = amplification
        super().__init__(message)


class InfeasibleError(ApproxError):
    exit_code = EXIT_INFEASIBLE
