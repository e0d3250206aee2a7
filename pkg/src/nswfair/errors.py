"""Exception hierarchy shared by all modules."""


class NswFairError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NswFairError, ValueError):
    """An item or agent index lies outside the instance universe."""


class ContractError(NswFairError, ValueError):
    """A documented precondition of an operation does not hold."""


class ResourceError(NswFairError, RuntimeError):
    """An exhaustive enumeration would exceed its configured budget."""


class UnsupportedModeError(NswFairError, TypeError):
    """The operation is not defined for this valuation mode."""


class ParseError(NswFairError, ValueError):
    """A serialized instance or allocation is malformed."""
