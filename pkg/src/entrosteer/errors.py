"""Exception hierarchy shared by every module."""


class EntroSteerError(Exception):
    """Base class for all errors raised by entrosteer."""


class ValidationError(EntroSteerError):
    """Input violates a structural or sign invariant."""


class NormalizationError(ValidationError):
    """Total probability mass is outside the accepted tolerance."""


class OutOfDomainError(EntroSteerError):
    """A region or window reaches outside the grid."""


class ArityError(EntroSteerError):
    """Wrong number of axes for the requested quantity."""


class CommensurabilityError(EntroSteerError):
    """Window edges do not fall on grid nodes."""


class ZeroProbabilityWindowError(EntroSteerError):
    """Conditioning on a window that carries no mass."""


class TailMassError(EntroSteerError):
    """Grid does not cover enough of a density's mass."""
