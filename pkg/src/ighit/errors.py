"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NonConvergence(RuntimeError):
    """An adaptive numerical routine exhausted its budget before reaching tolerance."""


class NumericalInstability(RuntimeError):
    """Successive approximations disagree badly; the result cannot be trusted."""


class BudgetExceeded(RuntimeError):
    """A rejection or iteration loop exceeded its configured trial cap."""
