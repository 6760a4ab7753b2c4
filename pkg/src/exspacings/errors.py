"""Exception hierarchy shared by all modules."""


class ExspacingsError(Exception):
    """Base class for library errors."""


class ValidationError(ExspacingsError):
    """A configuration or argument failed validation before any computation."""


class DomainError(ExspacingsError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested at a point where the quantity has no finite limit."""


class ConditionError(ExspacingsError):
    """A regularity condition required by the requested operation fails."""


class PositivityError(ConditionError):
    """The spacing ratio h is not positive on the evaluation grid."""


class DivergenceError(ExspacingsError):
    """A quantity defined through an integral is infinite, so the requested
    derived value (e.g. a minimizer) is undefined."""


class QuadratureError(ExspacingsError):
    """Adaptive quadrature failed to reach the requested accuracy."""
