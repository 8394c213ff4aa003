"""Exception types shared across the package."""


class BreathingBoxError(Exception):
    """Base class for all package-specific failures."""


class RootRefinementError(BreathingBoxError):
    """A Bessel zero could not be refined to the required residual."""


class QuadratureError(BreathingBoxError):
    """Adaptive quadrature failed to reach the requested stability."""


class DomainError(BreathingBoxError):
    """A point lies outside the static domain of the box."""


class PropagationError(BreathingBoxError):
    """Time propagation was configured or behaved inconsistently."""


class ConfigError(BreathingBoxError):
    """A run configuration failed validation.

    The message starts with the dotted path of the offending field.
    """
