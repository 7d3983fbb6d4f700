"""Exception types raised across the package."""


class ReuleauxError(ValueError):
    """Base class for all geometric and numerical failures in this package."""


class DegenerateCircles(ReuleauxError):
    pass


class InvalidN(ReuleauxError):
    pass


class OutOfRange(ReuleauxError):
    pass


class InvalidDiskPolygon(ReuleauxError):
    pass


class NotConstantWidth(ReuleauxError):
    """Raised when vertices fail the diameter constraints of a Reuleaux polygon.

    The offending :class:`~reuleaux.geometry.ValidationReport` is kept on
    ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SingularArc(ReuleauxError):
    pass


class StepTooLarge(ReuleauxError):
    pass


class TriangleImmovable(ReuleauxError):
    pass


class CoincidentPoints(ReuleauxError):
    pass


class RankDeficient(ReuleauxError):
    pass


class InconsistentQ(ReuleauxError):
    pass


class RedundantCenter(ReuleauxError):
    pass


class StallError(ReuleauxError):
    pass


class NonOddReduction(ReuleauxError):
    pass


class ParseError(ReuleauxError):
    pass
