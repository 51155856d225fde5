"""Exception and warning types raised across the toolkit."""


class RVWalkError(ValueError):
    """Base class for all toolkit errors."""


class InvalidAtomError(RVWalkError):
    pass


class UnsupportedCenteringError(RVWalkError):
    pass


class InsufficientPilotError(RVWalkError):
    pass


class ScheduleError(RVWalkError):
    """Scaling schedule is out of range or not valid for the tail index."""


class MissingBoundError(RVWalkError):
    pass


class ConeViolationError(RVWalkError):
    """The target set meets every cone around the drift direction -c."""


class InvalidEpsilonError(RVWalkError):
    pass


class UnsupportedShapeError(RVWalkError):
    pass


class UnboundedNearOriginError(RVWalkError):
    """The limit measure of the set would be infinite."""


class AmbiguousSetError(RVWalkError):
    """Set neither contains a neighbourhood of 0 nor is bounded away from 0."""


class InfiniteMeasureError(RVWalkError):
    pass


class DivergentIntegralError(RVWalkError):
    pass


class HorizonError(RVWalkError):
    pass


class ConfigError(RVWalkError):
    pass


class ZeroEventWarning(UserWarning):
    """A Monte Carlo run observed no events; its interval degenerates."""


class EmptyBlocksWarning(UserWarning):
    pass
