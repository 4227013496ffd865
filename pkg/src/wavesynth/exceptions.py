"""Error types shared across the package."""


class ConfigError(ValueError):
    """Invalid user-facing parameter.  The message names the parameter."""


class DomainError(ConfigError):
    """Argument outside the domain of a special function or table."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


class WaveOverflowError(NumericalError, OverflowError):
    """A wave or polynomial value does not fit in double precision."""


class SolverError(NumericalError):
    """The singular value decomposition did not converge."""
