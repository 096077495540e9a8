"""Exception hierarchy for the design engine.

Every error carries a stable ``code`` used for CLI exit codes and HTTP
error bodies.  Codes with dedicated exit codes: ``configuration``,
``unattainable-design``, ``degeneracy``, ``small-sample``; everything
else exits 1.
"""


class EngineError(Exception):
    """Base class for all engine failures."""

    code = "engine"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConfigurationError(EngineError):
    """Invalid or inconsistent user input (bad field values, schema violations)."""

    code = "configuration"


class DomainError(ConfigurationError):
    """Argument outside the mathematical domain of an operation."""

    code = "configuration"


class CapabilityError(EngineError):
    """Request beyond what the engine supports (e.g. Sobol dimension)."""

    code = "capability"


class UnattainableDesignError(EngineError):
    """The requested power cannot be reached for the given design."""

    code = "unattainable-design"


class DegeneracyError(EngineError):
    """Singular covariance / zero asymptotic variance where positive is required."""

    code = "degeneracy"


class DegenerateSampleError(DomainError):
    """Sample carries no information for the fit (e.g. zero variance)."""


class BoundaryMleError(DomainError):
    """MLE lies on the boundary of the parameter space (e.g. all-zero Bernoulli)."""


class SmallSampleError(EngineError):
    """Estimates fell into the small-sample regime where the asymptotic
    machinery is unreliable; traditional simulation-based design is advised."""

    code = "small-sample"


class FlatLengthError(SmallSampleError):
    """Expected interval length did not change between probe sample sizes."""


class MonotonicityError(SmallSampleError):
    """Fitted length-vs-n line has non-positive slope (ill-defined regime)."""


class OptimizationError(EngineError):
    """Numerical optimizer failed to converge."""

    code = "optimization"


class CurvatureError(OptimizationError):
    """Hessian at the located mode is not positive definite."""


class InstabilityError(EngineError):
    """Too large a fraction of inner fits failed to be trustworthy."""

    code = "instability"


class ProposalMismatchError(EngineError):
    """Importance-sampling proposal badly mismatched to the target posterior."""

    code = "proposal-mismatch"


class ExtrapolationWarning(UserWarning):
    """Requested point outside the support of an interpolated curve."""
