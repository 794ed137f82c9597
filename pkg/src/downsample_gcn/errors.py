"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InfeasibleError(ValueError):
    """A requested target cannot be reached by the model."""


class ConfigError(ValueError):
    """Inconsistent model or experiment configuration."""


class DegenerateOutputError(ArithmeticError):
    """A network output has zero norm, so a relative error is undefined."""


class NumericalError(RuntimeError):
    """A numerical routine (eigensolver, quadrature) failed."""
