"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class InvalidStateError(RuntimeError):
    """An operation was applied to an object in the wrong state."""


class NotFoundError(RuntimeError):
    """A numerical search did not locate the requested feature."""
