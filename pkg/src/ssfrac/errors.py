"""Exception hierarchy shared by every module."""


class SSFracError(Exception):
    """Base class for all library errors."""


class DomainError(SSFracError, ValueError):
    """Argument outside the half-plane / range where the quantity is defined."""


class QuadratureError(SSFracError, ArithmeticError):
    """A numerical integral failed to reach the requested tolerance."""


class NotInB(DomainError):
    """The Bernstein function has infinite derivative at 0+."""


class RadiusError(DomainError):
    """Power-series argument outside the disc of convergence."""


class NonConvergence(SSFracError, ArithmeticError):
    """An iterative evaluation exhausted its term / node budget."""


class Unsupported(SSFracError, NotImplementedError):
    """The requested route is not available for this Bernstein function."""


class ContourError(SSFracError, ValueError):
    """No admissible vertical contour for the Mellin-Barnes integral."""


class HorizonError(SSFracError, RuntimeError):
    """A simulated path did not reach the target level inside the horizon."""


class ConfigError(SSFracError, ValueError):
    """Invalid simulation or CLI configuration."""
