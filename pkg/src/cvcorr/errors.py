"""Exception and warning types raised by :mod:`cvcorr`."""


class CvcorrError(Exception):
    """Base class for all library errors."""


class NotPositiveDefinite(CvcorrError, ValueError):
    """A matrix that must be positive definite failed the Cholesky pivot test."""


class NonConvergence(CvcorrError, RuntimeError):
    pass


class DimensionMismatch(CvcorrError, ValueError):
    pass


class NonPhysical(CvcorrError, ValueError):
    """Covariance matrix violates the uncertainty relation."""


class InvalidPartition(CvcorrError, ValueError):
    pass


class EmptySelection(InvalidPartition):
    pass


class InvalidGrouping(InvalidPartition):
    pass


class InvalidPermutation(InvalidPartition):
    pass


class InvalidFactor(CvcorrError, ValueError):
    pass


class InvalidChannel(CvcorrError, ValueError):
    """Channel fails the complete-positivity certificate or has bad shapes."""


class NotSymplectic(CvcorrError, ValueError):
    pass


class DegenerateDenominator(CvcorrError, ZeroDivisionError):
    pass


class ConstructionFailed(CvcorrError, RuntimeError):
    pass


class FormatError(CvcorrError, ValueError):
    """State, channel or transform document could not be parsed."""


class SinglePartyWarning(UserWarning):
    """Measure requested for a partition with a single party."""
