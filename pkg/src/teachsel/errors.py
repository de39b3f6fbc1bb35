"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when inputs violate a documented precondition or invariant."""


class ScenarioError(InvalidInputError):
    """Raised when a scenario file cannot be parsed or fails validation."""


class VerificationError(RuntimeError):
    """Raised when a brute-force check contradicts an analytical result."""
