"""Exception hierarchy shared by all qwalk modules.

Guard errors (truncation, stability, scaling, dimension budget,
normalization) signal that a numerical precondition was violated; the CLI
maps them to exit status 2, configuration problems to exit status 1.
"""


class QwalkError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(QwalkError):
    """Operands have incompatible shapes or dimensions."""


class NonUnitaryInputError(QwalkError):
    """A matrix that must be unitary fails the unitarity check."""


class NormalizationLostError(QwalkError):
    """A probability vector lost too much mass during evolution."""


class NotMajorizedError(QwalkError):
    """The source vector does not majorize the target vector."""


class NotFactorizableError(QwalkError):
    """The probability vector does not factor over the requested split."""


class DimensionBudgetError(QwalkError):
    """A requested construction exceeds the configured dimension cap."""


class TruncationInadequateError(QwalkError):
    """The Fock-space truncation cannot represent the requested state."""


class StabilityBoundError(QwalkError):
    """Integrator step size violates the stability precondition."""


class ScalingInvalidError(QwalkError):
    """Discretization parameters fall outside their valid range."""


class OverflowGuardError(QwalkError):
    """An operator polynomial grew beyond the configured norm guard."""


class ConfigError(QwalkError):
    """Experiment configuration failed validation."""
