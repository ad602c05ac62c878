"""Exception types shared across the solver."""


class ExnerError(Exception):
    """Base class for solver failures."""


class NonHyperbolicError(ExnerError):
    """Characteristic cubic does not have three distinct real roots."""


class NegativeDepthError(ExnerError):
    """Water thickness h dropped to zero or below."""


class SingularSystemError(ExnerError):
    """Tridiagonal solve hit a zero pivot."""


class ConfigError(ExnerError):
    """Invalid configuration file or option."""


class SimulationAbort(ExnerError):
    """A run was stopped by a stability monitor (MCFL >= 1, h <= 0, ...)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
