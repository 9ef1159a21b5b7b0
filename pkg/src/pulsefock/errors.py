"""Exception types raised across the package."""


class PulseFockError(Exception):
    """Base class for all physics/runtime errors raised by pulsefock."""


class GridMismatch(PulseFockError):
    pass


class SupportOutOfBounds(PulseFockError):
    """A pulse (or its evolved/shifted image) leaves the guarded interior of the grid."""


class ZeroMode(PulseFockError):
    pass


class NonCommensurateShift(PulseFockError):
    """Translation distance is not an integer number of lattice sites."""


class RailMismatch(PulseFockError):
    pass


class NotNormalized(PulseFockError):
    pass


class TruncationError(PulseFockError):
    """Modes are not captured by the truncated eigenbasis to the required weight."""


class ConfigError(ValueError):
    """Invalid scenario configuration. The message names the offending field."""
