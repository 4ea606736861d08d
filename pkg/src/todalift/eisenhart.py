"""The one-extra-dimension Eisenhart lift of the Toda chain.

Positions (q_1..q_n, y) with metric diag(1, ..., 1, 1/(2V(q))) turn the chain
into geodesic motion: the geodesic Hamiltonian is

    H = sum_i p_i^2 / 2 + p_y^2 V(q),

p_y is conserved, and p_y = 1 reproduces the original trajectories while
p_y = c reproduces the chain with every coupling scaled by c.  The Lax pair
lifts by attaching one factor of p_y to every coupling, which makes all of
its entries homogeneous of degree one in the momenta; the lifted invariants
are then momentum polynomials, the raw material for Killing tensors.

Geodesics are integrated in Hamiltonian form throughout; the metric itself
is only materialised for tests and tensor comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetricError, DomainError
from .integrate import IntegratorConfig, Trajectory, integrate
from .toda import PhaseState, TodaSystem, potential, potential_gradient

__all__ = [
    "EisenhartState",
    "GeneralizedMomenta",
    "metric_eisenhart",
    "metric_eisenhart_inverse",
    "hamiltonian_eisenhart",
    "geodesic_rhs",
    "lifted_lax",
    "lifted_invariants",
    "hamiltonian_generalized_couplings",
    "lift_from_toda",
    "project_to_toda",
    "pack_state",
    "unpack_state",
    "state_labels",
    "flow_field",
    "geodesic_monitors",
    "run_geodesic",
]


@dataclass(frozen=True)
class EisenhartState:
    """Point of the lifted phase space: (q, y; p, p_y)."""

    q: np.ndarray
    y: float
    p: np.ndarray
    p_y: float

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise DomainError("q and p must be equal-length vectors")
        vals = [float(self.y), float(self.p_y)]
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p)) and np.all(np.isfinite(vals))):
            raise DomainError("state entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "p_y", float(self.p_y))

    @property
    def n(self) -> int:
        return len(self.q)


@dataclass(frozen=True)
class GeneralizedMomenta:
    """One momentum per coupling, replacing each g_i by ptilde_i g_i."""

    ptilde: np.ndarray

    def __post_init__(self):
        pt = np.atleast_1d(np.asarray(self.ptilde, dtype=float))
        if pt.ndim != 1 or not np.all(np.isfinite(pt)):
            raise DomainError("ptilde must be a finite vector")
        object.__setattr__(self, "ptilde", pt)


def _check_dims(sys: TodaSystem, state: EisenhartState):
    if state.n != sys.n:
        raise DomainError(f"state has {state.n} particles, system has {sys.n}")


def metric_eisenhart(sys: TodaSystem, q) -> np.ndarray:
    """Lift metric diag(1, ..., 1, 1/(2V(q))) over positions (q, y)."""
    v = potential(sys, q)
    if v <= 0.0:
        raise DegenerateMetricError("lift metric degenerates where the potential vanishes")
    diag = np.ones(sys.n + 1)
    diag[-1] = 1.0 / (2.0 * v)
    return np.diag(diag)


def metric_eisenhart_inverse(sys: TodaSystem, q) -> np.ndarray:
    v = potential(sys, q)
    if v <= 0.0:
        raise DegenerateMetricError("lift metric degenerates where the potential vanishes")
    diag = np.ones(sys.n + 1)
    diag[-1] = 2.0 * v
    return np.diag(diag)


def hamiltonian_eisenhart(sys: TodaSystem, state: EisenhartState) -> float:
    """Geodesic energy sum(p^2)/2 + p_y^2 V(q)."""
    _check_dims(sys, state)
    return float(0.5 * np.dot(state.p, state.p) + state.p_y**2 * potential(sys, state.q))


def geodesic_rhs(
    sys: TodaSystem, state: EisenhartState
) -> tuple[np.ndarray, float, np.ndarray, float]:
    """Canonical flow of the lift Hamiltonian: (dq, dy, dp, dp_y)/dt.

    dy/dt = 2 p_y V(q) and p_y is constant; at p_y = 1 the (q, p) block is
    exactly the chain's own flow.
    """
    _check_dims(sys, state)
    dq = state.p.copy()
    dy = 2.0 * state.p_y * potential(sys, state.q)
    dp = -(state.p_y**2) * potential_gradient(sys, state.q)
    return dq, dy, dp, 0.0


def lifted_lax(sys: TodaSystem, state: EisenhartState) -> tuple[np.ndarray, np.ndarray]:
    """Lax pair with every coupling multiplied by p_y.

    Each entry is homogeneous of degree one in (p, p_y), so Tr(L^k) is a
    degree-k momentum polynomial.
    """
    _check_dims(sys, state)
    scaled = TodaSystem(n=sys.n, g=state.p_y * sys.g)
    from .toda import lax_pair

    return lax_pair(scaled, PhaseState(q=state.q, p=state.p))


def lifted_invariants(sys: TodaSystem, state: EisenhartState, kmax: int) -> np.ndarray:
    """Tr(L^k)/k of the lifted Lax matrix for k = 1..kmax."""
    if not (1 <= kmax <= sys.n):
        raise DomainError(f"kmax must satisfy 1 <= kmax <= {sys.n}, got {kmax}")
    lmat, _ = lifted_lax(sys, state)
    out = np.zeros(kmax)
    power = lmat
    for k in range(1, kmax + 1):
        out[k - 1] = np.trace(power) / k
        if k < kmax:
            power = power @ lmat
    return out


def hamiltonian_generalized_couplings(
    sys: TodaSystem, state: PhaseState, momenta: GeneralizedMomenta
) -> float:
    """Energy with each coupling g_i promoted to the momentum ptilde_i g_i:

        sum(p^2)/2 + sum_i ptilde_i^2 g_i^2 exp(2 (q_i - q_{i+1})).

    Constant ptilde = 1 recovers the chain energy; constant ptilde = c the
    chain with couplings c g.
    """
    if state.n != sys.n:
        raise DomainError(f"state has {state.n} particles, system has {sys.n}")
    if momenta.ptilde.shape != (sys.n - 1,):
        raise DomainError(f"ptilde must have length n-1={sys.n - 1}")
    w = (momenta.ptilde * sys.g) ** 2 * np.exp(2.0 * (state.q[:-1] - state.q[1:]))
    return float(0.5 * np.dot(state.p, state.p) + np.sum(w))


def lift_from_toda(state: PhaseState, p_y: float = 1.0, y: float = 0.0) -> EisenhartState:
    return EisenhartState(q=state.q, y=y, p=state.p, p_y=p_y)


def project_to_toda(state: EisenhartState) -> PhaseState:
    """Drop the fibre coordinate and its momentum."""
    return PhaseState(q=state.q, p=state.p)


def pack_state(state: EisenhartState) -> np.ndarray:
    return np.concatenate([state.q, [state.y], state.p, [state.p_y]])


def unpack_state(sys: TodaSystem, vec: np.ndarray) -> EisenhartState:
    n = sys.n
    if len(vec) != 2 * n + 2:
        raise DomainError(f"packed state must have length {2 * n + 2}")
    return EisenhartState(q=vec[:n], y=float(vec[n]), p=vec[n + 1 : 2 * n + 1], p_y=float(vec[2 * n + 1]))


def state_labels(sys: TodaSystem) -> tuple[str, ...]:
    n = sys.n
    return (
        tuple(f"q_{i}" for i in range(1, n + 1))
        + ("y",)
        + tuple(f"p_{i}" for i in range(1, n + 1))
        + ("p_y",)
    )


def flow_field(sys: TodaSystem):
    """Geodesic vector field over the packed state [q, y, p, p_y]."""
    n = sys.n
    gsq = sys.g**2

    def rhs(t: float, vec: np.ndarray) -> np.ndarray:
        q = vec[:n]
        p = vec[n + 1 : 2 * n + 1]
        p_y = vec[2 * n + 1]
        w = gsq * np.exp(2.0 * (q[:-1] - q[1:]))
        out = np.zeros(2 * n + 2)
        out[:n] = p
        out[n] = 2.0 * p_y * np.sum(w)
        out[n + 1 : 2 * n] -= 2.0 * p_y**2 * w
        out[n + 2 : 2 * n + 1] += 2.0 * p_y**2 * w
        return out

    return rhs


def geodesic_monitors(sys: TodaSystem, kmax: int | None = None):
    """Monitors p_y, lifted I_1..I_kmax and the lift energy."""
    kmax = sys.n if kmax is None else kmax
    mons = {"p_y": lambda t, vec: float(vec[2 * sys.n + 1])}
    for k in range(1, kmax + 1):
        mons[f"I_{k}"] = lambda t, vec, k=k: float(
            lifted_invariants(sys, unpack_state(sys, vec), k)[k - 1]
        )
    mons["H"] = lambda t, vec: hamiltonian_eisenhart(sys, unpack_state(sys, vec))
    return mons


def run_geodesic(
    sys: TodaSystem,
    state: EisenhartState,
    cfg: IntegratorConfig,
    kmax: int | None = None,
) -> Trajectory:
    _check_dims(sys, state)
    return integrate(
        flow_field(sys),
        pack_state(state),
        cfg,
        monitors=geodesic_monitors(sys, kmax),
        labels=state_labels(sys),
    )
