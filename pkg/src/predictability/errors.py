"""Exception hierarchy shared by every module."""


class PredictabilityError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(PredictabilityError, ValueError):
    pass


class InvalidPmf(PredictabilityError, ValueError):
    pass


class AbsoluteContinuityViolation(PredictabilityError, ValueError):
    """The marginal puts mass where the forecast has none.

    Usually a truncation artifact: extend the support of the forecast.
    """


class NotStochastic(PredictabilityError, ValueError):
    pass


class Reducible(PredictabilityError, ValueError):
    pass


class Periodic(PredictabilityError, ValueError):
    pass


class NotReversible(PredictabilityError, ValueError):
    pass


class NotSurjective(PredictabilityError, ValueError):
    pass


class HorizonExceedsScan(PredictabilityError, RuntimeError):
    """Predictability is still above epsilon at the last scanned lead time."""


class UnstableQueue(PredictabilityError, ValueError):
    pass


class ConfigError(PredictabilityError, ValueError):
    """Scenario or CLI configuration problem; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ValidationFailure(PredictabilityError, RuntimeError):
    """Two independent computation routes disagree beyond tolerance."""
