"""Exception hierarchy shared by all stirap modules."""


class StirapError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(StirapError, ValueError):
    """Invalid or out-of-range configuration value."""


class DimensionError(StirapError, ValueError):
    pass


class HermiticityViolation(StirapError, ValueError):
    pass


class NumericalError(StirapError, ArithmeticError):
    """Non-finite values appeared in a computation.

    Attributes
    ----------
    t : float or None
        Simulation time at which the failure was detected, if known.
    """

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class UndefinedAngle(StirapError, ValueError):
    """Mixing angle requested where both drive envelopes vanish."""


class EvolutionDiverged(StirapError, ArithmeticError):
    """An evolution broke trace or Hermiticity invariants beyond tolerance."""


class SweepError(StirapError):
    """A sweep row failed; ``coordinates`` names the offending row."""

    def __init__(self, message, coordinates):
        super().__init__(message)
        self.coordinates = coordinates
