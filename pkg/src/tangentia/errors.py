"""Exception types shared across the library."""


class TangentiaError(Exception):
    """Base class for all library-specific errors."""


class EmptyBall(TangentiaError):
    """A ball query found no mass where positive mass was required."""


class EmptyMeasure(TangentiaError):
    """The measure has no support points."""


class NotNormalized(TangentiaError):
    """An operation required unit mass on the open unit ball."""


class InnerBallEmpty(TangentiaError):
    """A measure has zero mass on the inner ball B(0, 1/2) (or B(0, theta/2))."""


class UnsupportedDim(TangentiaError):
    """The requested search is not implemented for this ambient dimension."""


class InsufficientData(TangentiaError):
    """Too few usable scales or samples for the requested estimate."""


class DegenerateSpectrum(TangentiaError):
    """Principal directions are not unique at the requested dimension."""


class BadBasis(TangentiaError):
    """A basis that was required to be orthonormal is not."""


class DepthOverflow(TangentiaError):
    """An iterated construction would exceed its point budget."""


class DimensionMismatch(TangentiaError):
    """Operands live in different ambient dimensions."""
