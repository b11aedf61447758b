"""Exception types shared across the package."""


class CVMError(Exception):
    """Base class for all cvm2d errors."""


class GridError(CVMError, ValueError):
    """Bad grid dimensions, bad text input, or an out-of-range cell request."""


class ConsistencyError(CVMError, ValueError):
    """Configuration counts whose sums do not match the grid size."""


class DomainError(CVMError, ValueError):
    """A parameter outside the domain where a formula is defined."""


class DivergenceError(DomainError):
    """The closed-form equilibrium denominator vanishes."""


class StateError(CVMError, ValueError):
    """A cell pair that cannot be swapped (both cells share a state)."""


class ConvergenceError(CVMError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""


class InfeasiblePatternError(CVMError, ValueError):
    """A pattern generator could not place every requested active unit."""

    def __init__(self, message, placed=0):
        super().__init__(message)
        self.placed = placed
