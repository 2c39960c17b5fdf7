"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario configuration or config file failed validation."""


class NumericalError(RuntimeError):
    """Base class for failures of the numerical machinery."""


class EvaluationError(NumericalError):
    """A surface function returned a non-finite value."""


class NonFiniteState(NumericalError):
    """An integrator stage produced non-finite state components."""


class DegenerateHeading(NumericalError):
    """A heading vector with (numerically) zero Riemannian norm."""


class SvdFailure(NumericalError):
    """Singular value decomposition did not converge."""


class MissingContext(ValueError):
    """A lift was requested without the context components it needs."""


class UnsupportedChoice(ValueError):
    """The requested operation is not defined for this dictionary choice."""


class DimensionMismatch(ValueError):
    """Vector or matrix dimensions do not agree."""


class NoEstimates(ValueError):
    """A metric over estimated positions was requested but none exist."""
