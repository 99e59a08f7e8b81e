"""Exception hierarchy shared by every module of the package."""


class GasketError(Exception):
    """Base class for all errors raised by gasket_interp."""


class NotOnGasket(GasketError, ValueError):
    pass


class SamePoint(GasketError, ValueError):
    pass


class NotInCell(GasketError, ValueError):
    pass


class DimensionMismatch(GasketError, ValueError):
    pass


class BudgetExceeded(GasketError, RuntimeError):
    pass


class NoCommonPath(GasketError):
    pass


class OutsideWindow(GasketError, ValueError):
    pass


class InvalidWeights(GasketError, ValueError):
    pass


class DomainError(GasketError, ValueError):
    pass


class NotConnected(GasketError, ValueError):
    pass
