"""Exception types shared across the package."""


class DomainError(ValueError):
    """Raised when an argument lies outside the domain where an operation is defined."""


class ResourceCapError(RuntimeError):
    """Raised when a requested computation exceeds a configured resource cap."""
