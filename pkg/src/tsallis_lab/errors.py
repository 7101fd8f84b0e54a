"""Exception types raised across the package."""


class TsallisLabError(Exception):
    """Base class for all errors raised by tsallis_lab."""


class SimplexError(TsallisLabError, ValueError):
    pass


class NegativeComponent(SimplexError):
    pass


class NotNormalized(SimplexError):
    def __init__(self, total):
        self.total = total
        super().__init__(f"components sum to {total}, not 1")


class IndexOutOfRange(SimplexError, IndexError):
    pass


class ZeroMass(SimplexError):
    pass


class ArityMismatch(SimplexError):
    pass


class InvalidConditional(SimplexError):
    pass


class InvalidPermutation(SimplexError):
    pass


class AlphaIsOne(TsallisLabError, ValueError):
    def __init__(self, msg="alpha = 1 is the Shannon branch; use shannon()"):
        super().__init__(msg)


class DomainError(TsallisLabError, ValueError):
    pass


class StepLimitExceeded(TsallisLabError, RuntimeError):
    pass


class AmbiguousReconstruction(TsallisLabError, ArithmeticError):
    pass


class SizeLimit(TsallisLabError, RuntimeError):
    pass
