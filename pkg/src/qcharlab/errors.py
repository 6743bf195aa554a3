"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the range an operation is defined for."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured memory/scan/search budget."""
