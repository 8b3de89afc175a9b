"""Exception hierarchy shared by all modules."""


class ClusterPainleveError(Exception):
    """Base class for errors raised by this package."""


class UsageError(ClusterPainleveError, ValueError):
    """Invalid arguments: mismatched variable tables, bad indices, bad k."""


class NotDivisible(ClusterPainleveError, ArithmeticError):
    """Raised when an exact division has a nonzero remainder."""


class DivisionByZero(ClusterPainleveError, ZeroDivisionError):
    pass


class SingularSubstitution(ClusterPainleveError, ZeroDivisionError):
    """Zero substituted into a variable that occurs with a negative exponent."""


class SingularityEncountered(ClusterPainleveError, ZeroDivisionError):
    """A numeric orbit hit a zero (or -1) where a recurrence divides by it."""


class BudgetExceeded(ClusterPainleveError, RuntimeError):
    """A symbolic computation grew past the configured term budget."""
