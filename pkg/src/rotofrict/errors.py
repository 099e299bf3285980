"""Exceptions raised when a numerical or physical guard is violated."""


class GuardError(RuntimeError):
    """A named validity guard failed; ``guard`` identifies which one."""

    guard = "guard"

    def __init__(self, message: str, guard: str | None = None):
        super().__init__(message)
        if guard is not None:
            self.guard = guard


class TruncationError(GuardError):
    """Population leaked into the highest modeled level."""

    guard = "tail_mass"


class StiffnessError(GuardError):
    """The explicit integrator could not complete the requested interval."""

    guard = "stiffness"


class QuadratureError(GuardError):
    """The quadrature self-check exceeded its tolerance."""

    guard = "quadrature_resolution"


class CutoffError(GuardError):
    """The UV cutoff is not far enough above the modeled transition frequencies."""

    guard = "cutoff_ratio"
