"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """An operation would exceed its configured memory or enumeration budget."""


class DegreeTooHighError(ValueError):
    """A truth table is not the evaluation of a polynomial within the degree cap."""

    def __init__(self, degree: int, cap: int):
        super().__init__(f"word has algebraic degree {degree}, exceeding cap {cap}")
        self.degree = degree
        self.cap = cap


class ConfigError(ValueError):
    """An experiment configuration violates its contract."""


class TrialAssertionError(AssertionError):
    """A per-trial cross-check failed during an experiment run."""
