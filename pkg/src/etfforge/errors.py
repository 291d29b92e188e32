"""Exception hierarchy.

Every error raised for bad mathematical input derives from :class:`DomainError`
so the command line can map it to a single exit code.
"""


class DomainError(ValueError):
    """Input is well formed but mathematically unacceptable."""


class NotPrime(DomainError):
    pass


class SizeLimit(DomainError):
    pass


class FieldMismatch(DomainError):
    pass


class DegreeMismatch(DomainError):
    pass


class ZeroElement(DomainError, ZeroDivisionError):
    """Raised for inverses and discrete logs of zero."""


class ShapeMismatch(DomainError):
    pass


class DuplicateElements(DomainError):
    pass


class NotASubgroup(DomainError):
    pass


class NotASubgroupOfH(DomainError):
    pass


class EvenCharacteristic(DomainError):
    pass


class NotPrimePower(DomainError):
    pass


class BadParameters(DomainError):
    pass


class EmptySubset(DomainError):
    pass


class NotTight(DomainError):
    pass


class NotTall(DomainError):
    pass


class RankMismatch(DomainError):
    pass


class ParseError(DomainError):
    pass


class SchemaError(DomainError):
    pass


class InvalidRds(DomainError):
    pass


class InvalidMuetf(DomainError):
    pass


class TakeTooMany(DomainError):
    pass


class InconsistentParameters(DomainError):
    pass


class NotEnoughFamilies(DomainError):
    pass


class InputNotEtf(DomainError):
    pass


class RedundancyOutOfRange(DomainError):
    pass


class NonIntegralD(DomainError):
    pass


class NonUnitColumnsWarning(UserWarning):
    """Imported frame has columns whose norm is not 1."""
