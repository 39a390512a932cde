"""Exception hierarchy.

``ValidationError`` covers bad input (CLI exit code 2); ``ResourceLimit``
means a configured cap was hit on a legitimate instance (exit code 3).
"""


class BundleLabError(Exception):
    pass


class ValidationError(BundleLabError, ValueError):
    pass


class ResourceLimit(BundleLabError, RuntimeError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NonHomogeneous(ValidationError):
    def __init__(self, message: str, degrees=None):
        super().__init__(message)
        self.degrees = list(degrees) if degrees is not None else None


class DegreeMismatch(ValidationError):
    pass


class NotInjective(ValidationError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class RankNonpositive(ValidationError):
    pass


class NotUnimodular(ValidationError):
    pass


class TooFewForms(ValidationError):
    pass


class RowLengthMismatch(ValidationError):
    pass


class InfiniteFiber(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class CertificationFailed(ValidationError):
    def __init__(self, message: str, check: str, members=()):
        super().__init__(message)
        self.check = check
        self.members = tuple(members)


class GroebnerLimitError(ResourceLimit):
    pass


class WindowInsufficient(ResourceLimit):
    pass


class SamplingExhausted(ResourceLimit):
    pass


class BudgetExhausted(ResourceLimit):
    pass
