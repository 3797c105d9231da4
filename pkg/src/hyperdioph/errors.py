"""Exception hierarchy shared by every module of the package."""


class HyperDiophError(Exception):
    """Base class for all package errors."""


class DegenerateInputError(HyperDiophError, ValueError):
    pass


class UndefinedHeightError(HyperDiophError, ValueError):
    pass


class BudgetExhaustedError(HyperDiophError, RuntimeError):
    pass


class UnsupportedInputError(HyperDiophError, ValueError):
    pass


class NotDisjointError(HyperDiophError, ValueError):
    """Raised when two convex bodies have no positive-length common perpendicular."""


class InvalidPointError(HyperDiophError, ValueError):
    pass


class NotOnHypersphereError(HyperDiophError, ValueError):
    pass


class NotAChainError(HyperDiophError, ValueError):
    pass


class NoCenterError(HyperDiophError, ValueError):
    pass


class InfiniteDiameterError(HyperDiophError, ValueError):
    pass


class EmptyInputError(HyperDiophError, ValueError):
    pass


class UnboundedEnumerationError(HyperDiophError, ValueError):
    pass
