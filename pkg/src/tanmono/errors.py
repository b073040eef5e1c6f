"""Exception hierarchy.

Numerical failures (exit code 2 on the command line) derive from
:class:`NumericalError`; bad inputs (exit code 1) derive from
:class:`ParameterError`.
"""


class MonodromyError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(MonodromyError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(ParameterError):
    """Non-finite input reached an evaluator."""


class GeometryError(ParameterError):
    """A parameter path violates clearance or continuity."""


class NumericalError(MonodromyError):
    """A numerical procedure failed to deliver a trustworthy result."""


class PoleError(NumericalError):
    def __init__(self, x, pole):
        self.x = x
        self.pole = pole
        super().__init__(f"x={x!r} is within pole tolerance of tan pole at {pole!r}")


class ConvergenceError(NumericalError):
    """Newton iteration did not converge."""


class BoundaryRootError(NumericalError):
    """A root lies too close to a counting contour."""


class SubdivisionError(NumericalError):
    """Root isolation could not separate roots."""


class OrderError(NumericalError):
    """Critical point order exceeds the supported maximum."""


class TrackingError(NumericalError):
    """Continuation failed along a path."""


class AmbiguousMatchError(TrackingError):
    """Endpoint matching did not pass the ratio test."""


class ProbeError(TrackingError):
    """Detour probing could not find a side that lifts the real root."""


class LabelingError(NumericalError):
    """Roots at the basepoint do not fit the requested labeling mode."""


class SeriesTooLargeError(NumericalError):
    """An intermediate closure in the derived series exceeded its cap."""


class CertificationError(NumericalError):
    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
