"""Exception types shared across the package."""


class MehlerError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MehlerError, ValueError):
    """Operands disagree in variable count or truncation order."""


class NonUnitError(MehlerError, ValueError):
    """A rational power was requested of a series whose constant term is not 1."""


class NonNilpotentError(MehlerError, ValueError):
    """``exp`` was requested of a series with a nonzero constant term."""


class ArityError(MehlerError, ValueError):
    """An operation received the wrong number of variables."""


class RadicalError(MehlerError, ValueError):
    """A square root does not lie in Q(sqrt 2)."""


class AxisError(MehlerError, IndexError):
    """An axis index is out of range."""


class VariantError(MehlerError, ValueError):
    """Unknown variant name for an identity family."""


class BudgetError(MehlerError, RuntimeError):
    """A configured resource budget was exceeded."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrabilityError(MehlerError, ValueError):
    """A sampled function lacks the Gaussian decay quadrature relies on."""


class SingularityError(MehlerError, ValueError):
    """A matrix that must be invertible is singular."""


class IllConditionedError(MehlerError, ValueError):
    """A least-squares fit has (numerically) no signal to fit."""


class DivergenceError(MehlerError, ValueError):
    """A truncated series is evaluated outside its convergence margin."""
