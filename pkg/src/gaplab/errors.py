"""Exception types shared across gaplab."""


class GaplabError(Exception):
    """Base class for all gaplab errors."""


class InvalidClassError(GaplabError, ValueError):
    """Residue class is not allowed for the requested pattern (or gcd(q, r) > 1)."""


class RangeError(GaplabError, ValueError):
    """Requested limits exceed the supported 64-bit range."""


class DomainError(GaplabError, ValueError):
    """Argument outside the mathematical domain of the operation."""


class PreAsymptoticError(DomainError):
    """Rescaling requested below the trend-domain threshold, where it is meaningless."""


class InsufficientDataError(GaplabError, ValueError):
    """Not enough data points for the requested fit or statistic."""


class FitConvergenceError(GaplabError, RuntimeError):
    """Iterative fit failed to converge; carries diagnostics in args."""
