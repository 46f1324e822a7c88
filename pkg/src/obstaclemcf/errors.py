"""Exception types shared across the package."""

from __future__ import annotations


class ObstacleFlowError(Exception):
    """Base class for all package errors."""


class ParameterError(ObstacleFlowError):
    """A scalar parameter or parameter combination is out of its admissible range."""


class GridMismatchError(ObstacleFlowError):
    """Two fields (or a field and an obstacle sample) live on different grids."""


class UsageError(ObstacleFlowError):
    """An operation was invoked in a way its contract forbids.

    Examples: querying the smooth residual exactly at a kink radius, running a
    kink check whose mode contradicts the slope order, or verifying a candidate
    whose parameters were never validated.
    """


class ConfigError(ObstacleFlowError):
    """A scenario config file failed to parse or validate.

    Carries the full list of violations so a caller can report all of them at
    once instead of one per run.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericalFailure(ObstacleFlowError):
    """The evolving field stopped being finite.

    `time` is the first snapshot time at which a non-finite value was seen.
    """

    def __init__(self, time: float, detail: str = ""):
        self.time = time
        msg = f"non-finite field values at t={time:.6g}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
