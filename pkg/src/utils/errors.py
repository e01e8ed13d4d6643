"""
Error types. Each carries the exit code the CLI reports for it.
"""


class HermspdeError(Exception):
    """Base class for all hermspde failures."""
    exit_code = 1


class ConfigError(HermspdeError, ValueError):
    """Invalid configuration or violated precondition."""
    exit_code = 2


class SolverError(HermspdeError, RuntimeError):
    """Linear-algebra failure (singular system, eigensolver non-convergence)."""
    exit_code = 3

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class BlowUpError(HermspdeError, RuntimeError):
    """Non-finite state during time stepping."""
    exit_code = 4

    def __init__(self, path: int, time: float, message: str = ""):
        text = message or f"Non-finite state on path {path} at t={time:.6g}"
        super().__init__(text)
        self.path = path
        self.time = time


class InvariantViolation(HermspdeError, AssertionError):
    """A proven inequality failed numerically (indicates a bug)."""
    exit_code = 5
