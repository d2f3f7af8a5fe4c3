"""Exception types shared across the package."""


class CatKappaError(Exception):
    """Base class for all package errors."""


class EmbeddingViolation(CatKappaError):
    """Point coordinates do not satisfy the model-space embedding constraint."""


class AntipodalPoints(CatKappaError):
    """Distance undefined: points are (numerically) antipodal on the sphere."""


class EpsilonOutOfRange(CatKappaError):
    """Convexity-constant angle must lie strictly inside (0, pi/2)."""


class InfeasibleConstraints(CatKappaError):
    """No admissible sample satisfied the requested constraints."""


class ProjectionDidNotConverge(CatKappaError):
    """Cyclic projection sweeps exhausted their budget before stabilizing."""


class MissingParam(CatKappaError):
    """A class inequality needs a coefficient that was not supplied."""


class DomainSamplerEmpty(CatKappaError):
    """The pair sampler produced no points."""


class SchemeUnknown(CatKappaError):
    """Iteration scheme id not in the registry."""


class NotConverged(CatKappaError):
    """Iteration budget exhausted with residual above tolerance."""

    def __init__(self, message, trace=None, k_estimate=None):
        super().__init__(message)
        self.trace = trace
        self.k_estimate = k_estimate


class BudgetExhausted(CatKappaError):
    """Search budget ran out; best-so-far result attached."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class MissingSeries(CatKappaError):
    """Requested plot series is not present in the trace."""


class ConfigError(CatKappaError):
    """Experiment configuration is invalid; message names the offending key."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
