"""Exception hierarchy shared by all darksol modules.

Grouped by how the command line maps them to exit codes: validation
problems (bad input, exit 2), failures to converge (exit 3), and
structural defects of a converged answer (exit 4).
"""


class DarksolError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DarksolError):
    """Input rejected before any computation started.

    `reason` is a short machine-readable tag so callers can distinguish
    failure modes without parsing the message.
    """

    def __init__(self, message: str, reason: str = "invalid"):
        super().__init__(message)
        self.reason = reason


class GridMismatchError(ValidationError):
    """Grid spacing or alignment is incommensurate with the coefficient period."""

    def __init__(self, message: str):
        super().__init__(message, reason="incommensurate_grid")


class ExpressionError(ValidationError):
    """Coefficient expression failed to parse or used an unknown name."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(message, reason="bad_expression")
        self.position = position


class ConfigError(ValidationError):
    """Run configuration file is missing keys or holds unusable values."""

    def __init__(self, message: str):
        super().__init__(message, reason="bad_config")


class NonConvergence(DarksolError):
    """Iteration budget exhausted before the stopping test was met."""

    def __init__(self, message: str, final_residual: float = float("nan"),
                 iterations: int = 0):
        super().__init__(message)
        self.final_residual = final_residual
        self.iterations = iterations


class BracketViolation(DarksolError):
    """Newton iterate left the a-priori solution bracket more than once."""


class LineSearchFailure(DarksolError):
    """Backtracking could not find a step that decreases the objective."""


class SingularLinearization(DarksolError):
    """Linearized system is singular or the Newton correction diverges."""


class MonotonicityLoss(DarksolError):
    """Converged front profile is not monotone, so the run is not trustworthy."""


class NoSignChange(DarksolError):
    """Profile has no sign change, so there is no front position to report."""


class StepDivergence(DarksolError):
    """Time step produced a non-finite or runaway field."""


class PhaseUndefined(DarksolError):
    """Phase history cannot be fitted (too few samples or vanishing modulus)."""


class TailUnderflow(DarksolError):
    """Too few tail samples above the floating-point floor to fit a decay rate."""
