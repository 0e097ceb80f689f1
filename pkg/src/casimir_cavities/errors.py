"""Exception types shared across the package."""


class CavityError(Exception):
    """Base class for all package errors."""


class NotFiniteGroupError(CavityError):
    """Closure generation exceeded the configured element bound."""


class SingularPointError(CavityError):
    """Evaluation requested on a light cone / at a coincident image point."""


class SingularConfigurationError(CavityError):
    """Geometry puts an image point on top of the observation point."""


class OnFixedLocusError(CavityError):
    """Field point lies on the fixed plane/axis of a symmetry element."""


class PoleError(CavityError):
    """Zeta evaluation requested at a pole of the analytic continuation."""

    def __init__(self, message, residue=None):
        super().__init__(message)
        self.residue = residue


class InputError(CavityError):
    """Invalid argument outside any configured tolerance question."""
