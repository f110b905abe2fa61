"""Exception hierarchy shared by every module of the package."""


class CrossnormError(Exception):
    """Base class for all errors raised by :mod:`crossnorm`."""


class DimensionError(CrossnormError, ValueError):
    """Shapes or dimensions of the inputs do not agree."""


class CapabilityError(CrossnormError):
    """The requested computation is not supported for the given spaces or tags."""


class BudgetError(CrossnormError):
    """An exhaustive routine would exceed its configured enumeration cap."""
