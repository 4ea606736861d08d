"""Toda chain dynamics and its geometric lifts.

Simulates the non-periodic Toda chain, re-expresses it as geodesic motion on
the one-extra-dimension Eisenhart lift and on the multi-dimensional
symmetric-space lift, and cross-checks the identities tying the three
pictures together: Lax-pair invariants, exact matrix-exponential geodesics,
right-invariant form monitors, dimensional reduction, isometries, and
higher-rank Killing tensors extracted from lifted Lax invariants.
"""

from .errors import (
    ConditioningError,
    ConfigError,
    ConstraintError,
    DefinitenessError,
    DegenerateMetricError,
    DivergenceError,
    DomainError,
    NotHomogeneousError,
    StiffnessError,
)
from .integrate import IntegratorConfig, Trajectory
from .toda import PhaseState, TodaSystem

__version__ = "0.1.0"

__all__ = [
    "ConditioningError",
    "ConfigError",
    "ConstraintError",
    "DefinitenessError",
    "DegenerateMetricError",
    "DivergenceError",
    "DomainError",
    "NotHomogeneousError",
    "StiffnessError",
    "IntegratorConfig",
    "Trajectory",
    "PhaseState",
    "TodaSystem",
    "__version__",
]
