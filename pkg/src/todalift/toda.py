"""The non-periodic Toda chain.

Hamiltonian

    H(q, p) = sum_i p_i^2 / 2 + sum_{i<n} g_i^2 exp(2 (q_i - q_{i+1}))

with canonical equations of motion, the tridiagonal Lax pair (L, M), trace
invariants I_k = Tr(L^k) / k, and the evolution matrix A(t) solving
dA/dt = -M A, which conjugates L(0) into L(t).

The normalisation I_k = Tr(L^k) / k is the one for which I_1 is the total
momentum and I_2 the Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .integrate import IntegratorConfig, Trajectory, integrate, integrate_at_times

__all__ = [
    "TodaSystem",
    "PhaseState",
    "potential",
    "potential_gradient",
    "hamiltonian",
    "eom_rhs",
    "lax_pair",
    "invariants",
    "com_split",
    "pack_state",
    "unpack_state",
    "state_labels",
    "flow_field",
    "invariant_monitors",
    "run",
    "evolve_A",
]


@dataclass(frozen=True)
class TodaSystem:
    """Particle count n and the n-1 nearest-neighbour couplings g.

    The potential depends on g squared, so the sign of each coupling only
    matters inside the Lax matrices.  Zero couplings are allowed.
    """

    n: int
    g: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"need at least two particles, got n={self.n}")
        g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if g.shape != (self.n - 1,):
            raise DomainError(f"coupling vector must have length n-1={self.n - 1}, got {g.shape}")
        if not np.all(np.isfinite(g)):
            raise DomainError("couplings must be finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class PhaseState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if q.shape != p.shape or q.ndim != 1:
            raise DomainError(f"q and p must be equal-length vectors, got {q.shape} and {p.shape}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise DomainError("phase-space entries must be finite")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return len(self.q)


def _check_dims(sys: TodaSystem, state: PhaseState):
    if state.n != sys.n:
        raise DomainError(f"state has {state.n} particles, system has {sys.n}")


def _pair_weights(sys: TodaSystem, q: np.ndarray) -> np.ndarray:
    """g_i^2 exp(2 (q_i - q_{i+1})) for each neighbour pair."""
    return sys.g**2 * np.exp(2.0 * (q[:-1] - q[1:]))


def potential(sys: TodaSystem, q) -> float:
    q = np.asarray(q, dtype=float)
    if q.shape != (sys.n,):
        raise DomainError(f"position vector must have length {sys.n}")
    return float(np.sum(_pair_weights(sys, q)))


def potential_gradient(sys: TodaSystem, q) -> np.ndarray:
    """dV/dq_i; each pair weight pulls its left particle and pushes its right."""
    q = np.asarray(q, dtype=float)
    w = _pair_weights(sys, q)
    grad = np.zeros(sys.n)
    grad[:-1] += 2.0 * w
    grad[1:] -= 2.0 * w
    return grad


def hamiltonian(sys: TodaSystem, state: PhaseState) -> float:
    _check_dims(sys, state)
    return float(0.5 * np.dot(state.p, state.p) + potential(sys, state.q))


def eom_rhs(sys: TodaSystem, state: PhaseState) -> tuple[np.ndarray, np.ndarray]:
    """Canonical flow: dq/dt = p, dp/dt = -dV/dq."""
    _check_dims(sys, state)
    return state.p.copy(), -potential_gradient(sys, state.q)


def lax_pair(sys: TodaSystem, state: PhaseState) -> tuple[np.ndarray, np.ndarray]:
    """Tridiagonal Lax matrices with dL/dt = [L, M] along the flow.

    L carries p on the diagonal, g on the subdiagonal and g_i e^{2(q_i -
    q_{i+1})} on the superdiagonal; M is twice the superdiagonal part of L.
    """
    _check_dims(sys, state)
    n = sys.n
    w = sys.g * np.exp(2.0 * (state.q[:-1] - state.q[1:]))
    lmat = np.diag(state.p.astype(float))
    mmat = np.zeros((n, n))
    idx = np.arange(n - 1)
    lmat[idx + 1, idx] = sys.g
    lmat[idx, idx + 1] = w
    mmat[idx, idx + 1] = 2.0 * w
    return lmat, mmat


def invariants(sys: TodaSystem, state: PhaseState, kmax: int) -> np.ndarray:
    """I_k = Tr(L^k) / k for k = 1..kmax.  I_1 = sum(p), I_2 = H."""
    if not (1 <= kmax <= sys.n):
        raise DomainError(f"kmax must satisfy 1 <= kmax <= {sys.n}, got {kmax}")
    lmat, _ = lax_pair(sys, state)
    out = np.zeros(kmax)
    power = lmat
    for k in range(1, kmax + 1):
        out[k - 1] = np.trace(power) / k
        if k < kmax:
            power = power @ lmat
    return out


def com_split(sys: TodaSystem, state: PhaseState) -> tuple[PhaseState, float, float]:
    """Remove the centre-of-mass motion.

    Returns (centered state, Q, P) with Q = sum(q), P = sum(p).  The
    potential only sees differences of positions, so it is unchanged.
    """
    _check_dims(sys, state)
    big_q = float(np.sum(state.q))
    big_p = float(np.sum(state.p))
    centered = PhaseState(q=state.q - big_q / sys.n, p=state.p - big_p / sys.n)
    return centered, big_q, big_p


def pack_state(state: PhaseState) -> np.ndarray:
    return np.concatenate([state.q, state.p])


def unpack_state(sys: TodaSystem, y: np.ndarray) -> PhaseState:
    n = sys.n
    if len(y) != 2 * n:
        raise DomainError(f"packed state must have length {2 * n}")
    return PhaseState(q=y[:n], p=y[n : 2 * n])


def state_labels(sys: TodaSystem) -> tuple[str, ...]:
    n = sys.n
    return tuple(f"q_{i}" for i in range(1, n + 1)) + tuple(f"p_{i}" for i in range(1, n + 1))


def flow_field(sys: TodaSystem):
    """Vector field over the packed state [q, p] for the integrator."""
    n = sys.n
    gsq = sys.g**2

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        q = y[:n]
        w = gsq * np.exp(2.0 * (q[:-1] - q[1:]))
        out = np.empty(2 * n)
        out[:n] = y[n:]
        out[n:] = 0.0
        out[n : 2 * n - 1] -= 2.0 * w
        out[n + 1 :] += 2.0 * w
        return out

    return rhs


def invariant_monitors(sys: TodaSystem, kmax: int | None = None):
    """Monitors I_1..I_kmax and H over the packed state."""
    kmax = sys.n if kmax is None else kmax
    if not (1 <= kmax <= sys.n):
        raise DomainError(f"kmax must satisfy 1 <= kmax <= {sys.n}, got {kmax}")
    mons = {}
    for k in range(1, kmax + 1):
        mons[f"I_{k}"] = lambda t, y, k=k: float(
            invariants(sys, unpack_state(sys, y), k)[k - 1]
        )
    mons["H"] = lambda t, y: hamiltonian(sys, unpack_state(sys, y))
    return mons


def run(
    sys: TodaSystem,
    state: PhaseState,
    cfg: IntegratorConfig,
    kmax: int | None = None,
) -> Trajectory:
    """Integrate the chain, monitoring the trace invariants and the energy."""
    _check_dims(sys, state)
    return integrate(
        flow_field(sys),
        pack_state(state),
        cfg,
        monitors=invariant_monitors(sys, kmax),
        labels=state_labels(sys),
    )


def evolve_A(
    sys: TodaSystem, traj: Trajectory, cfg: IntegratorConfig | None = None
) -> list[np.ndarray]:
    """Evolution matrices A(t) with dA/dt = -M A and A(0) = I.

    The chain state and A are co-integrated from the trajectory's initial
    state and sampled exactly at the trajectory times, so that
    A(t) L(0) A(t)^-1 reproduces L(t).
    """
    if len(traj) == 0:
        raise DomainError("cannot evolve A along an empty trajectory")
    n = sys.n
    if traj.states.shape[1] != 2 * n:
        raise DomainError("trajectory was not produced by this system")
    if cfg is None:
        cfg = IntegratorConfig(method="adaptive", rtol=1e-12, atol=1e-14, t_final=max(traj.times[-1], 1e-6))

    base = flow_field(sys)

    def rhs(t: float, z: np.ndarray) -> np.ndarray:
        y = z[: 2 * n]
        amat = z[2 * n :].reshape(n, n)
        _, mmat = lax_pair(sys, unpack_state(sys, y))
        return np.concatenate([base(t, y), (-mmat @ amat).ravel()])

    z0 = np.concatenate([traj.states[0], np.eye(n).ravel()])
    out = integrate_at_times(rhs, z0, traj.times, cfg)
    return [row[2 * n :].reshape(n, n).copy() for row in out.states]
