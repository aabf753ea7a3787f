"""Exception hierarchy.

Two branches matter to callers: ``InvalidParameters`` (bad input, CLI exit 1)
and ``VerificationError`` (the mathematics disagreed with itself, CLI exit 2).
"""


class RazavyError(Exception):
    pass


class InvalidParameters(RazavyError, ValueError):
    pass


class VerificationError(RazavyError):
    pass


class RootsNotReal(VerificationError):
    pass


class RootsCoincide(VerificationError):
    pass


class CrossCheckFailed(VerificationError):
    pass


class SingularSystem(VerificationError):
    pass


class EnergyNotCritical(InvalidParameters):
    pass


class FormMismatch(InvalidParameters):
    pass


class DomainTooSmall(InvalidParameters):
    pass


class GridTooCoarse(RazavyError):
    pass


class BasisTooSmall(VerificationError):
    pass


class EdgeMismatch(VerificationError):
    pass


class OrderingViolation(VerificationError):
    pass
