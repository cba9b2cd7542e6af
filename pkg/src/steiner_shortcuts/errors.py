"""Exception types shared across the package."""


class ShortcutError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(ShortcutError, ValueError):
    """A construction or configuration parameter is out of range."""


class ContractViolation(ShortcutError):
    """An operation was called with inputs that break its precondition."""


class ResourceError(ShortcutError):
    """A derived size exceeds a configured budget."""

    def __init__(self, message: str, count: int | None = None):
        super().__init__(message)
        self.count = count
