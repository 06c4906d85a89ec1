"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidContextError(DomainError):
    """The pair (d, p) does not define a valid orbit context."""


class UnsupportedConfigurationError(DomainError):
    """The inputs are valid but the requested structure result does not apply."""


class CapacityError(DomainError):
    """The input is too large for an exhaustive computation."""


class ConsistencyError(AssertionError):
    """An identity that must hold for valid inputs failed. Always a bug."""
