"""
Exception hierarchy for the Floquet spectrum toolkit.

Input problems derive from ValueError and map to CLI exit code 2,
numerical breakdowns derive from RuntimeError and map to exit code 3.
"""

from typing import Optional


class FloquetError(Exception):
    """Base class for every error raised by the toolkit."""


class FloquetInputError(FloquetError, ValueError):
    """Bad input: the caller asked for something ill-posed."""


class MalformedInputError(FloquetInputError):
    pass


class OrderIndexError(FloquetInputError):
    def __init__(self, k: int, n: int):
        super().__init__(f"Order index k={k} outside 1..{n}")
        self.k = k
        self.n = n


class ParameterError(FloquetInputError):
    pass


class PreconditionError(FloquetInputError):
    pass


class ConfigError(FloquetInputError):
    pass


class FloquetNumericalError(FloquetError, RuntimeError):
    """A numerical kernel could not deliver a trustworthy result."""


class IntegrationFailureError(FloquetNumericalError):
    def __init__(self, message: str, last_x: float):
        super().__init__(f"{message} (last x reached: {last_x!r})")
        self.last_x = last_x


class DivergenceError(FloquetNumericalError):
    def __init__(self, x: float):
        super().__init__(f"Non-finite state encountered at x={x!r}")
        self.x = x


class EigensolverFailureError(FloquetNumericalError):
    def __init__(self, iterations: int, dimension: int):
        super().__init__(
            f"Shifted QR did not converge after {iterations} iterations (dimension {dimension})"
        )
        self.iterations = iterations
        self.dimension = dimension


class ContourFailureError(FloquetNumericalError):
    def __init__(self, message: str, attempts: Optional[list] = None):
        super().__init__(message)
        # one entry per perturbation retry, for CLI diagnostics
        self.attempts = attempts or []
