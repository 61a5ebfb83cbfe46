"""Exception types shared across the toolkit."""


class DivkitError(Exception):
    """Base class for all toolkit-specific errors."""


class GridMismatchError(DivkitError):
    """Two grid functions do not live on the same grid."""


class DegenerateDensityError(DivkitError):
    """Raw density values cannot be normalized (all zero)."""


class DegenerateIntegralError(DivkitError):
    """A log-form divergence met a non-positive constituent integral.

    ``term`` names the offending integral so callers can report it.
    """

    def __init__(self, term: str, value: float):
        self.term = term
        self.value = value
        super().__init__(f"degenerate integral: {term} = {value:g} (must be > 0)")


class NotStandardizableError(DivkitError):
    """Generator has no finite value or right derivative at 0."""
