"""Exception hierarchy shared across the package."""


class IsopulseError(Exception):
    """Base class for all package errors."""


class ContractError(IsopulseError):
    """A caller-side precondition was violated (bad shape, bad config, bad file)."""


class DomainError(IsopulseError):
    """An evaluation left the mathematically valid domain (divergent drive,
    non-finite sample, empty overlap)."""


class ConvergenceError(IsopulseError):
    """The integrator exhausted its step budget or failed to advance.

    Attributes
    ----------
    reached : float
        Independent-variable value reached before giving up.
    """

    def __init__(self, message: str, reached: float):
        super().__init__(message)
        self.reached = reached


class SingularityError(IsopulseError):
    """The local expansion at x = 0 of the pairing ODE does not exist."""


class CatalogError(IsopulseError, LookupError):
    """Unknown catalog row or class tag."""


class ScanError(IsopulseError):
    """A landscape scan failed at a named grid point."""


class MapFormatError(IsopulseError):
    """A landscape file failed to parse.

    Attributes
    ----------
    line : int | None
        1-based line number of the offending line, if known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
