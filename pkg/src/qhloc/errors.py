"""Exception hierarchy shared by every qhloc module."""


class QHLocError(Exception):
    """Base class for errors raised by qhloc."""


class ParameterError(QHLocError, ValueError):
    """A parameter is out of range or inconsistent with the model."""


class ModelDomainError(QHLocError, ValueError):
    """The requested construction does not exist for this model family."""


class PreconditionError(QHLocError, ValueError):
    """An operation was called on inputs violating its documented precondition."""


class NoMetricError(QHLocError, ValueError):
    """The operator is not diagonalizable with a real spectrum, so no metric exists."""


class ScaleCapError(QHLocError, RuntimeError):
    """An exhaustive computation would exceed the configured size cap."""


class ReductionError(QHLocError, RuntimeError):
    """Simultaneous reduction failed even though nontrivial solutions exist."""
