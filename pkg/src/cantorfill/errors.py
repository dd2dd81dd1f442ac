"""Exception hierarchy shared by every module."""


class CantorFillError(Exception):
    """Base class; ``details`` is merged into machine-readable error reports."""

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ComparableNodesError(CantorFillError, ValueError):
    pass


class DepthError(CantorFillError, ValueError):
    """Mixed point lengths, or a depth too small for a construction."""


class NotSkewError(CantorFillError, ValueError):
    pass


class NotIncreasingError(CantorFillError, ValueError):
    pass


class PreconditionError(CantorFillError, ValueError):
    pass


class BudgetExceeded(CantorFillError, RuntimeError):
    pass


class DensityPreconditionError(CantorFillError, RuntimeError):
    """A configuration had no member as large as the construction requires."""


class FillingPreconditionError(CantorFillError, RuntimeError):
    pass


class NotDecidingError(CantorFillError, RuntimeError):
    pass


class SearchFailed(CantorFillError, RuntimeError):
    pass
