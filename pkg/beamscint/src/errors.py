"""
Exception hierarchy for the scintillation toolkit.
"""

from typing import Any


class ScintError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(ScintError, ValueError):
    """A physical parameter is outside its admissible range."""

    def __init__(self, parameter: str, message: str) -> None:
        self.parameter = parameter
        super().__init__(f"{parameter}: {message}")


class SingularInputError(ScintError, ValueError):
    """A function was evaluated at a point where it diverges."""


class QuadratureError(ScintError):
    """Base class for integration failures."""


class NonConvergenceError(QuadratureError):
    """The requested tolerance was not reached within the evaluation budget."""

    def __init__(self, message: str, value: float, abs_error: float, evaluations: int) -> None:
        self.value = value
        self.abs_error = abs_error
        self.evaluations = evaluations
        super().__init__(
            f"{message} (value={value:.6g}, error={abs_error:.3g}, evaluations={evaluations})"
        )


class IntegrandNaNError(QuadratureError):
    """The integrand returned a non-finite value."""

    def __init__(self, coordinate: Any) -> None:
        self.coordinate = coordinate
        super().__init__(f"integrand is not finite at {coordinate!r}")


class UnsupportedDimensionError(QuadratureError):
    """Nested adaptive quadrature was asked for too many dimensions."""


class BoundaryLeakageError(ScintError):
    """A distribution on a grid does not vanish at the grid edge."""


class InternalConsistencyError(ScintError):
    """A computed quantity violates an invariant the theory guarantees."""


class PipelineStageError(ScintError):
    """A pipeline stage failed; wraps the underlying error."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


class ConfigError(ScintError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, problems: list[str], line: int | None = None) -> None:
        self.problems = problems
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + "; ".join(problems))


class CacheError(ScintError):
    """The result cache could not be read or written."""
