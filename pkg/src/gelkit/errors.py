"""Exception types shared across the package."""


class GelkitError(Exception):
    """Base class for all package errors."""


class SpecificationError(GelkitError):
    """A system description violates a structural requirement."""


class ConfigError(SpecificationError):
    """A scenario configuration cannot be interpreted."""


class DomainError(GelkitError):
    """An argument lies outside the mathematical domain of an operation."""


class IntegrationError(GelkitError):
    """The ODE integrator failed.  Carries the last valid state, if any."""

    def __init__(self, message, last_t=None, last_state=None):
        super().__init__(message)
        self.last_t = last_t
        self.last_state = last_state


class StateSpaceError(GelkitError):
    """A direct master-equation state space is too large to integrate."""


class ConvergenceError(GelkitError):
    """An iterative solver exhausted its budget.  Carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CriterionUndefined(GelkitError):
    """A gel criterion is not defined at the requested state (no bonds yet)."""
