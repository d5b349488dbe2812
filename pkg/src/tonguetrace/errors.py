"""Exception types raised across the pipeline."""


class TongueTraceError(Exception):
    """Base class for all package errors."""


class DiracProduct(TongueTraceError):
    """Both factors of a product carry Dirac impulses."""


class ImpulseOnBoundary(TongueTraceError):
    """A Dirac impulse sits exactly on an integration limit."""


class SlotAlreadyFixed(TongueTraceError):
    """The jet coefficient being split is already determined."""


class SingularSecularSystem(TongueTraceError):
    """The linear system for the secular unknowns is singular."""


class ComplexRootInRealMode(TongueTraceError):
    """The zeta0 quadratic has a negative discriminant in real arithmetic."""


class NoConvergence(TongueTraceError):
    """Newton hit its iteration cap."""


class OutsideWindow(TongueTraceError):
    """Newton converged, but delta lies outside the search window."""


class SingularJacobian(TongueTraceError):
    """The finite-difference Jacobian carries no usable information."""


class BranchLost(TongueTraceError):
    """Continuation reached the step floor without converging."""

    def __init__(self, message, last_epsilon=None):
        super().__init__(message)
        self.last_epsilon = last_epsilon


class ConfigError(TongueTraceError):
    """Invalid run configuration."""
