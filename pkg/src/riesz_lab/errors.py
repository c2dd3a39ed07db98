"""Exception types shared across the package."""


class RieszLabError(Exception):
    """Base class for package errors."""


class DomainError(RieszLabError, ValueError):
    """A parameter lies outside the admissible range."""


class NumericError(RieszLabError, RuntimeError):
    """A numerical procedure failed to converge; carries the achieved error."""

    def __init__(self, message: str, achieved: float = float("nan")):
        super().__init__(message)
        self.achieved = achieved
