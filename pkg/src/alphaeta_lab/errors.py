"""
Exception hierarchy for the alphaeta lab.

Invalid arguments to a single operation raise plain ``ValueError``. The
classes below mark failures the CLI maps to dedicated exit codes.
"""


class AlphaEtaError(Exception):
    """Base class for all lab-specific errors."""


class ConfigError(AlphaEtaError, ValueError):
    """Configuration could not be parsed or holds an invalid value."""


class GuardViolation(AlphaEtaError, ValueError):
    """A desk-scale guard (key size, matrix size) was exceeded."""

    def __init__(self, message: str, limit: int, requested: int):
        super().__init__(message)
        self.limit = limit
        self.requested = requested


class NumericalError(AlphaEtaError, ArithmeticError):
    """A numerical routine produced a result outside its tolerances."""

    def __init__(self, message: str, diagnostics: dict = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def check_guard(name: str, requested: int, limit: int, allow_override: bool = False) -> None:
    """
    Enforce a desk-scale size guard.

    Args:
        name: Human readable name of the guarded quantity
        requested: Requested size
        limit: Largest size accepted without override
        allow_override: Accept sizes above the limit

    Raises:
        GuardViolation: If ``requested`` exceeds ``limit`` without override
    """
    if requested > limit and not allow_override:
        raise GuardViolation(
            f"{name} = {requested} exceeds the desk-scale guard of {limit}; "
            f"pass the override flag to run anyway",
            limit=limit,
            requested=requested,
        )
