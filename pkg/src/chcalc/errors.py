"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class AbsoluteContinuityViolated(InvalidArgument):
    """P assigns mass where the reference Q has none, so chi^2(P || Q) is infinite."""


class Infeasible(Exception):
    """No schedule satisfies the feasibility constraint.

    ``step`` is the offending step index when a single step exceeds the
    per-segment budget, else None.
    """

    def __init__(self, reason: str, step: int | None = None):
        super().__init__(reason)
        self.reason = reason
        self.step = step
