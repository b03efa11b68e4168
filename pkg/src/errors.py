"""Exception hierarchy for the imitation-learning toolkit.

Every error derives from ``LsIqError`` and from the builtin it refines, so
callers can catch either ``ValueError``/``RuntimeError`` or the precise type.
"""


class LsIqError(Exception):
    """Base class for all toolkit errors."""


class InvalidEnvironmentError(LsIqError, ValueError):
    """Environment layout or transition table is malformed."""


class InvalidPolicyError(LsIqError, ValueError):
    """A policy row is not a probability distribution."""


class InvalidDistributionError(LsIqError, ValueError):
    """A state-action table cannot be normalized into a distribution."""


class InvalidTemperatureError(LsIqError, ValueError):
    """Entropy temperature beta must be positive."""


class InvalidBatchError(LsIqError, ValueError):
    """A mini-batch is empty or inconsistent."""


class ConfigurationError(LsIqError, ValueError):
    """Configuration is inconsistent or incomplete."""


class UnsupportedConfigurationError(LsIqError, ValueError):
    """Operation has no closed form for the requested parameters."""


class InfiniteTargetError(LsIqError, ValueError):
    """Mixing coefficient makes a reward target infinite."""


class ConvergenceError(LsIqError, RuntimeError):
    """Iterative solver exhausted its budget."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(f"{message} (residual={residual:.3e} after {iterations} iterations)")
        self.residual = residual
        self.iterations = iterations


class UntrainedModelError(LsIqError, RuntimeError):
    """Model queried before observing any data."""


class ExpertQualityError(LsIqError, RuntimeError):
    """Trained expert violates the task's safety requirement."""
