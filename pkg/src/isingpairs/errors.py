"""Exception types shared across the package."""


class CoalescenceTimeoutError(RuntimeError):
    """The coupled chains did not meet within the step cap."""

    def __init__(self, steps: int):
        super().__init__(f"chains did not coalesce within {steps} steps")
        self.steps = steps


class CapacityError(ValueError):
    """Exact enumeration was requested on a volume above the site cap."""


class DobrushinViolationError(ValueError):
    """A bound requiring the contraction condition was evaluated at r >= 1."""
