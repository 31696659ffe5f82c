"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` (the input itself is
inadmissible) and :class:`CertificationError` (the input was fine but a
numerical certificate could not be established).  The CLI maps them to exit
codes 1 and 2.
"""


class SurfInterpError(Exception):
    """Base class for all package errors."""


class ValidationError(SurfInterpError):
    pass


class CertificationError(SurfInterpError):
    pass


class ValidationFailed(ValidationError):
    def __init__(self, violations, message=None):
        self.violations = list(violations)
        if message is None:
            kinds = sorted({v.kind for v in self.violations})
            message = "validation failed: " + ", ".join(kinds)
        super().__init__(message)


class ParseError(ValidationError):
    pass


class DomainMismatch(ValidationError):
    pass


class NotTimelike(ValidationError):
    pass


class ParallelTangents(ValidationError):
    pass


class NotInJn(ValidationError):
    pass


class DegeneratePlane(ValidationError):
    pass


class OutOfDomain(CertificationError):
    pass


class TruncationInsufficient(CertificationError):
    pass


class RefitResidualTooLarge(CertificationError):
    pass


class ImageEscapesDomain(CertificationError):
    pass


class DegenerateNormal(CertificationError):
    pass


class NotImmersed(CertificationError):
    pass


class IsotropyCertificateFailed(CertificationError):
    pass


class ReFNotZero(CertificationError):
    pass


class NoConvergence(CertificationError):
    pass


class DomainEscape(CertificationError):
    pass


class NoDescent(CertificationError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
