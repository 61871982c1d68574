"""Exception hierarchy shared by all acutemap modules.

The CLI maps these onto process exit codes: ConfigError -> 2,
NumericalError (and subclasses) -> 3, InvariantError (and subclasses) -> 4.
"""


class AcuteMapError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AcuteMapError):
    """Bad configuration, unsatisfied precondition, or malformed input file."""


class NumericalError(AcuteMapError):
    """A computation failed (singular system, degenerate geometry, no bracket)."""


class FoldError(NumericalError):
    """The non-monotone region around a corner could not be localized."""


class SplineMonotonicityError(NumericalError):
    """A monotone spline could not be built on the given interval.

    Callers are expected to widen the interval and retry.
    """


class TrustedRegionError(NumericalError):
    """Evaluation point outside the trusted disk |zeta| <= 1 - delta_rim."""


class InvariantError(AcuteMapError):
    """A contract the pipeline relies on was violated."""


class BoundaryError(InvariantError):
    """The boundary curve is not simple, not positively wound, or degenerate."""
