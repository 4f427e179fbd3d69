"""Exception hierarchy shared by the library and the command line."""


class ReachkitError(Exception):
    """Base class for all reachkit errors."""


class DomainError(ReachkitError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class WindowError(DomainError):
    """The grid window is too small (or wrongly placed) for the requested operation."""


class GridFormatError(ReachkitError, ValueError):
    """A grid or shape file could not be parsed."""


class HullUnboundedWarning(UserWarning):
    """Erosion removed every cell of the window, so the closing fills the window."""
