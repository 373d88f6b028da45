"""Exception types shared across the package."""

from __future__ import annotations


class PubgameError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PubgameError):
    """A configuration value is missing, malformed, or contradictory."""


class SchemaError(PubgameError):
    """An input record violates the documented dataset schema."""


class EnumerationBudgetError(PubgameError):
    """Exact enumeration was refused because the subset count exceeds the budget."""

    def __init__(self, n: int, k: int, count: int, budget: int):
        self.n = n
        self.k = k
        self.count = count
        self.budget = budget
        super().__init__(
            f"C({n}, {k}) = {count} subsets exceeds the enumeration budget of "
            f"{budget}; raise the budget explicitly or fall back to a heuristic "
            f"and report estimated recovery instead of the exact ratio"
        )


class ReductionInfeasibleError(PubgameError):
    """The subset-sum instance cannot be expressed as a selection instance."""


class CalibrationError(PubgameError):
    """Threshold calibration received degenerate inputs."""
