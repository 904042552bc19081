"""Exception hierarchy shared across the package.

Configuration problems and numerical failures are kept apart so the CLI can
map them to distinct exit codes (1 and 2 respectively).
"""


class HetloadError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(HetloadError):
    """A scenario or sweep description failed validation.

    Carries the offending field name so callers can point at it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NumericalError(HetloadError):
    """Base class for failures of the numerical machinery."""


class SeriesConvergenceError(NumericalError):
    """Cell-edge coverage series failed to meet its tolerance within the term cap."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested accuracy."""


class FixedPointError(NumericalError):
    """Activity-factor fixed point did not converge or lost its bracket."""


class BracketSearchError(NumericalError):
    """A bisection search had no sign change in the given bracket."""


class StateSpaceError(NumericalError):
    """Multi-class loss-system state space exceeded the configured cap."""


class GridResolutionError(NumericalError):
    """Bandwidth quantization grid too coarse for the given channel demands."""


class ZeroLoadError(NumericalError):
    """Energy efficiency is undefined at zero activity (no load)."""


class InsufficientSamplesError(NumericalError):
    """A Monte-Carlo estimate had too few samples in one user class."""
