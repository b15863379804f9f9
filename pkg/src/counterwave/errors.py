"""Exception types shared across the package."""


class CounterwaveError(Exception):
    """Base class for all package errors."""


class ConfigError(CounterwaveError, ValueError):
    """Invalid parameters or configuration."""


class ForbiddenRegimeError(CounterwaveError):
    """Requested motion lies in a classically forbidden parameter region."""


class NonConvergenceError(CounterwaveError):
    """A numerical integrator or quadrature failed to reach its tolerance.

    Attributes
    ----------
    last_state : object or None
        The last successfully computed state, when one is available.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state
