"""Exception types shared across the package."""


class DomainError(ValueError):
    """Inputs outside an operation's domain: bad shapes, indices or values."""


class DefinitenessError(DomainError):
    """A matrix that has to be positive definite is not."""


class ConstraintError(DomainError):
    """State violates a structural constraint (centering, trace condition)."""


class DegenerateMetricError(DomainError):
    """A metric block would be singular, e.g. vanishing potential."""


class NotHomogeneousError(DomainError):
    """Scalar failed the momentum-homogeneity probe."""


class StiffnessError(RuntimeError):
    """Adaptive step size underflowed."""


class DivergenceError(RuntimeError):
    """State or derivative became non-finite during integration."""


class ConditioningError(RuntimeError):
    """A numerical solve or extraction failed its residual gate."""


class ConfigError(ValueError):
    """Malformed experiment configuration; the message names the key."""
