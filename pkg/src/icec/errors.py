class ConfigurationError(ValueError):
    """Invalid physical parameters or run configuration."""


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class ThresholdError(DomainError):
    """Photon energy below the ionization threshold."""


class ExtrapolationError(DomainError):
    """Query outside a tabulated range."""


class TableParseError(ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class ConvergenceError(ArithmeticError):
    """Numerical procedure failed to converge; ``estimates`` holds what it had."""

    def __init__(self, message, estimates=()):
        self.estimates = tuple(estimates)
        super().__init__(message)
