"""Exception types raised by simris."""


class SimRISError(Exception):
    """Base class for all simris errors."""


class DegenerateGeometry(SimRISError, ValueError):
    """Two points coincide where a direction or distance > 0 is required."""


class NotSquare(SimRISError, ValueError):
    """The RIS element count is not a perfect square."""


class BelowReferenceDistance(SimRISError, ValueError):
    """Path loss requested below the 1 m close-in reference distance."""


class DimensionMismatch(SimRISError, ValueError):
    pass


class InsufficientSamples(SimRISError, ValueError):
    pass


class QuadratureFailure(SimRISError, RuntimeError):
    pass


class NotHermitian(SimRISError, ValueError):
    pass


class NoScatterers(SimRISError, RuntimeError):
    """Every resampling attempt lost all sub-rays to clipping."""


class ConfigError(SimRISError, ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class FarFieldWarning(UserWarning):
    """The Tx-RIS distance violates the far-field condition d > N lambda / 2."""
