"""Killing tensors from momentum-homogeneous conserved quantities.

A conserved quantity that is a homogeneous degree-k polynomial in the
momenta of a geodesic Hamiltonian is the full contraction

    I = (1/k!) K^{mu_1 ... mu_k} p_{mu_1} ... p_{mu_k}

of a rank-k Killing tensor K.  The components are recovered pointwise by
exact multivariate polarization: evaluating I on sums of basis momentum
vectors (entries in {0, 1, ..., k}) and combining with alternating signs.
Killing-ness itself is verified operationally, through vanishing Poisson
brackets with the geodesic Hamiltonian and through conservation along
integrated geodesics; for quadratic Hamiltonians this is equivalent to the
vanishing symmetrised covariant derivative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from . import eisenhart, oplift
from .errors import ConditioningError, DomainError, NotHomogeneousError
from .integrate import IntegratorConfig, integrate
from .toda import TodaSystem

__all__ = [
    "SymmetricTensorField",
    "KillingReport",
    "extract_tensor",
    "contract_table",
    "tensor_from_invariant",
    "poisson_bracket_fd",
    "verify_killing",
    "isometry_flow",
]

Invariant = Callable[[np.ndarray, np.ndarray], float]

_HOMOGENEITY_TOL = 1e-8
_RESIDUAL_GATE = 1e-9
_FD_STEP = 1e-5


def _multi_indices(rank: int, dim: int):
    """Sorted 1-based multi-indices of the given rank."""
    return combinations_with_replacement(range(1, dim + 1), rank)


def _multiplicity_factor(idx: tuple[int, ...]) -> float:
    """Product of factorials of repeat counts within a sorted multi-index."""
    out = 1.0
    run = 1
    for a, b in zip(idx, idx[1:]):
        run = run + 1 if a == b else 1
        out *= run if a == b else 1
    return out


def contract_table(table: dict[tuple[int, ...], float], rank: int, momenta) -> float:
    """Evaluate (1/k!) K^{mu_1..mu_k} p_{mu_1} ... p_{mu_k} from sorted components."""
    p = np.asarray(momenta, dtype=float)
    total = 0.0
    for idx, val in table.items():
        prod = val
        for mu in idx:
            prod *= p[mu - 1]
        total += prod / _multiplicity_factor(idx)
    return total


def extract_tensor(
    invariant: Invariant, rank: int, dim: int, position
) -> dict[tuple[int, ...], float]:
    """Recover the symmetric tensor components at one position.

    The invariant must be homogeneous of degree `rank` in the momenta
    (checked by a scaling probe).  Components come from the polarization
    identity, exact for polynomials; a contraction residual gate guards
    against a non-polynomial input slipping through.
    """
    if rank < 1 or rank > 8:
        raise DomainError(f"rank must be in 1..8, got {rank}")
    if dim < 1:
        raise DomainError(f"dim must be positive, got {dim}")
    pos = np.asarray(position, dtype=float)
    if pos.shape != (dim,):
        raise DomainError(f"position must have length {dim}")

    probe = (1.0 + np.arange(dim)) / dim
    f1 = invariant(pos, probe)
    f2 = invariant(pos, 2.0 * probe)
    if abs(f2 - (2.0**rank) * f1) > _HOMOGENEITY_TOL * max(1.0, abs(f2)):
        raise NotHomogeneousError(
            f"scaling probe failed: f(2p) = {f2}, 2^k f(p) = {(2.0 ** rank) * f1}"
        )

    table: dict[tuple[int, ...], float] = {}
    for idx in _multi_indices(rank, dim):
        acc = 0.0
        for mask in range(1, 2**rank):
            vec = np.zeros(dim)
            bits = 0
            for slot in range(rank):
                if mask >> slot & 1:
                    vec[idx[slot] - 1] += 1.0
                    bits += 1
            acc += (-1.0) ** (rank - bits) * invariant(pos, vec)
        table[idx] = acc

    rng = np.random.default_rng(0)
    for _ in range(3):
        p = rng.uniform(-1.0, 1.0, dim)
        want = invariant(pos, p)
        got = contract_table(table, rank, p)
        if abs(got - want) > _RESIDUAL_GATE * max(1.0, abs(want)):
            raise ConditioningError(
                f"extracted tensor fails its contraction gate: |{got} - {want}|"
            )
    return table


@dataclass
class SymmetricTensorField:
    """Rank-k symmetric contravariant tensor with position-dependent entries.

    Components are stored for sorted multi-indices only; queries with any
    index order return the same value.
    """

    rank: int
    dim: int
    components: dict[tuple[int, ...], Callable[[np.ndarray], float]]

    def component(self, idx, position) -> float:
        key = tuple(sorted(int(i) for i in idx))
        if len(key) != self.rank or not all(1 <= i <= self.dim for i in key):
            raise DomainError(f"multi-index {idx} invalid for rank {self.rank}, dim {self.dim}")
        return self.components[key](np.asarray(position, dtype=float))

    def contract(self, position, momenta) -> float:
        pos = np.asarray(position, dtype=float)
        table = {idx: fn(pos) for idx, fn in self.components.items()}
        return contract_table(table, self.rank, momenta)


def tensor_from_invariant(invariant: Invariant, rank: int, dim: int) -> SymmetricTensorField:
    """Wrap an invariant as a tensor field; extraction is cached per position."""
    cache: dict[bytes, dict[tuple[int, ...], float]] = {}

    def table_at(pos: np.ndarray) -> dict[tuple[int, ...], float]:
        key = pos.tobytes()
        if key not in cache:
            cache[key] = extract_tensor(invariant, rank, dim, pos)
        return cache[key]

    components = {
        idx: (lambda pos, idx=idx: table_at(pos)[idx]) for idx in _multi_indices(rank, dim)
    }
    return SymmetricTensorField(rank=rank, dim=dim, components=components)


def poisson_bracket_fd(
    f: Invariant, g: Invariant, position, momenta, h: float = _FD_STEP, richardson: bool = False
) -> float:
    """Central-difference Poisson bracket {f, g} at a phase point.

    Error is O(h^2); richardson=True combines steps h and h/2 for O(h^4).
    """
    if not (h > 0.0):
        raise DomainError("finite-difference step must be positive")
    if richardson:
        coarse = poisson_bracket_fd(f, g, position, momenta, h)
        fine = poisson_bracket_fd(f, g, position, momenta, 0.5 * h)
        return (4.0 * fine - coarse) / 3.0

    pos = np.asarray(position, dtype=float)
    mom = np.asarray(momenta, dtype=float)
    d = len(pos)
    total = 0.0
    for mu in range(d):
        dx = np.zeros(d)
        dx[mu] = h
        df_dq = (f(pos + dx, mom) - f(pos - dx, mom)) / (2.0 * h)
        dg_dq = (g(pos + dx, mom) - g(pos - dx, mom)) / (2.0 * h)
        df_dp = (f(pos, mom + dx) - f(pos, mom - dx)) / (2.0 * h)
        dg_dp = (g(pos, mom + dx) - g(pos, mom - dx)) / (2.0 * h)
        if not all(map(math.isfinite, (df_dq, dg_dq, df_dp, dg_dp))):
            raise DomainError("non-finite sample in Poisson bracket")
        total += df_dq * dg_dp - df_dp * dg_dq
    return total


@dataclass(frozen=True)
class KillingReport:
    """Outcome of one verification run, serialisable as JSON."""

    lift: str
    k: int
    bracket_max: float
    drift_max: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "lift": self.lift,
            "k": self.k,
            "bracket_max": self.bracket_max,
            "drift_max": self.drift_max,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _eisenhart_phase(sys: TodaSystem):
    n = sys.n

    def invariant_fn(k):
        def fn(pos, mom):
            state = eisenhart.EisenhartState(q=pos[:n], y=pos[n], p=mom[:n], p_y=mom[n])
            return float(eisenhart.lifted_invariants(sys, state, k)[k - 1])

        return fn

    def ham(pos, mom):
        state = eisenhart.EisenhartState(q=pos[:n], y=pos[n], p=mom[:n], p_y=mom[n])
        return eisenhart.hamiltonian_eisenhart(sys, state)

    def random_packed(rng):
        q = rng.uniform(-1.0, 1.0, n)
        p = rng.uniform(-1.0, 1.0, n)
        return np.concatenate([q, rng.uniform(-1.0, 1.0, 1), p, rng.uniform(-1.0, 1.0, 1)])

    def split(vec):
        return np.concatenate([vec[:n], [vec[n]]]), np.concatenate(
            [vec[n + 1 : 2 * n + 1], [vec[2 * n + 1]]]
        )

    return n + 1, invariant_fn, ham, random_packed, split, eisenhart.flow_field(sys)


def _generalized_phase(sys: TodaSystem):
    n = sys.n

    def invariant_fn(k):
        def fn(pos, mom):
            state = oplift.OPState(
                q=pos[:n], omega=pos[n:], p_q=mom[:n], p_omega=mom[n:], centered=False
            )
            return float(oplift.generalized_invariants(state, k)[k - 1])

        return fn

    def ham(pos, mom):
        state = oplift.OPState(
            q=pos[:n], omega=pos[n:], p_q=mom[:n], p_omega=mom[n:], centered=False
        )
        return oplift.generalized_hamiltonian(sys, state)

    def random_packed(rng):
        q = rng.uniform(-1.0, 1.0, n)
        q -= q.mean()
        p = rng.uniform(-1.0, 1.0, n)
        p -= p.mean()
        return np.concatenate(
            [q, rng.uniform(-1.0, 1.0, n - 1), p, rng.uniform(-1.0, 1.0, n - 1)]
        )

    def split(vec):
        return vec[: 2 * n - 1], vec[2 * n - 1 :]

    return 2 * n - 1, invariant_fn, ham, random_packed, split, oplift.flow_field_generalized(sys)


def verify_killing(
    sys: TodaSystem,
    lift: str,
    k: int,
    samples: int = 100,
    seed: int = 0,
    geodesics: int = 10,
    t_final: float = 20.0,
) -> KillingReport:
    """Check the rank-k invariant of a lift for Killing behaviour.

    Reports the max scaled Poisson bracket |{I_k, H}| over random phase
    points and the max relative drift of I_k along random geodesics.  PASS
    needs bracket < 1e-5 and drift < 1e-8.
    """
    if lift == "eisenhart":
        dim, invariant_fn, ham, random_packed, split, field = _eisenhart_phase(sys)
    elif lift == "generalized":
        dim, invariant_fn, ham, random_packed, split, field = _generalized_phase(sys)
    else:
        raise DomainError(f"unknown lift {lift!r}")
    if not (1 <= k <= sys.n):
        raise DomainError(f"k must satisfy 1 <= k <= {sys.n}, got {k}")

    inv = invariant_fn(k)
    rng = np.random.default_rng(seed)

    bracket_max = 0.0
    for _ in range(samples):
        vec = random_packed(rng)
        pos, mom = split(vec)
        value = poisson_bracket_fd(inv, ham, pos, mom)
        scale = max(1.0, abs(inv(pos, mom)) * abs(ham(pos, mom)))
        resid = abs(value) / scale
        if resid > 1e-5:
            value = poisson_bracket_fd(inv, ham, pos, mom, richardson=True)
            resid = abs(value) / scale
        bracket_max = max(bracket_max, resid)

    drift_max = 0.0
    cfg = IntegratorConfig(method="adaptive", rtol=1e-10, atol=1e-12, t_final=t_final, stride=20)
    for _ in range(geodesics):
        vec = random_packed(rng)

        def mon(t, y):
            pos, mom = split(y)
            return inv(pos, mom)

        traj = integrate(field, vec, cfg, monitors={"I": mon})
        drift_max = max(drift_max, traj.drift["I"])

    return KillingReport(
        lift=lift,
        k=k,
        bracket_max=bracket_max,
        drift_max=drift_max,
        passed=bracket_max < 1e-5 and drift_max < 1e-8,
    )


def isometry_flow(kind: str, index: int, state: oplift.OPState, parameter: float) -> oplift.OPState:
    """Finite isometry of the generalised lift metric.

    "omega-translation" shifts omega_index; "lambda" shifts q_index while
    rescaling the neighbouring omegas and their momenta so the energy is
    untouched (boundary terms are simply absent).  Lambda flows move the
    positions off the centered slice, so the result is tagged non-centered.
    """
    n = state.n
    if kind == "omega-translation":
        if not (1 <= index <= n - 1):
            raise DomainError(f"omega index must be in 1..{n - 1}, got {index}")
        omega = state.omega.copy()
        omega[index - 1] += parameter
        return oplift.OPState(
            q=state.q, omega=omega, p_q=state.p_q, p_omega=state.p_omega, centered=state.centered
        )
    if kind == "lambda":
        if not (1 <= index <= n):
            raise DomainError(f"lambda index must be in 1..{n}, got {index}")
        q = state.q.copy()
        omega = state.omega.copy()
        p_omega = state.p_omega.copy()
        q[index - 1] += parameter
        scale = math.exp(parameter)
        if index <= n - 1:
            omega[index - 1] *= scale
            p_omega[index - 1] /= scale
        if index >= 2:
            omega[index - 2] /= scale
            p_omega[index - 2] *= scale
        return oplift.OPState(q=q, omega=omega, p_q=state.p_q, p_omega=p_omega, centered=False)
    raise DomainError(f"unknown isometry generator kind {kind!r}")
