"""First-order ODE integration with fixed-step RK4 and an adaptive 5(4) pair.

The adaptive method is the Dormand-Prince embedded pair with the standard
step controller (safety 0.9, growth clamped to [0.2, 5.0]).  The last step is
always shortened to land exactly on the requested end time.  Conserved
quantities can be monitored along the way; their relative drift is recorded
on the returned trajectory.

Everything here is deterministic: identical inputs produce bit-identical
trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError, StiffnessError

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "rk4_step",
    "integrate",
    "integrate_at_times",
    "monitor_drift",
]

Rhs = Callable[[float, np.ndarray], np.ndarray]
Monitor = Callable[[float, np.ndarray], float]

# Dormand-Prince 5(4) tableau.  The fifth-order result is propagated; the
# difference row gives the embedded fourth-order error estimate.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = (
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_ERR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_MIN_STEP_FRACTION = 1e-14
_SAFETY = 0.9
_SHRINK_LIMIT = 0.2
_GROWTH_LIMIT = 5.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings for :func:`integrate`.

    dt is the fixed step for rk4 and the initial trial step for the adaptive
    method.  stride decimates the output: every stride-th accepted step is
    recorded (the endpoints always are).
    """

    method: str = "adaptive"
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12
    t_final: float = 10.0
    stride: int = 10

    def __post_init__(self):
        if self.method not in ("rk4", "adaptive"):
            raise DomainError(f"unknown integration method {self.method!r}")
        if not (self.dt > 0.0):
            raise DomainError("dt must be positive")
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise DomainError("rtol and atol must be positive")
        if not (self.t_final > 0.0):
            raise DomainError("t_final must be positive")
        if self.stride < 1:
            raise DomainError("stride must be >= 1")


@dataclass
class Trajectory:
    """Sampled solution plus monitored conserved quantities.

    drift maps each monitor name to max over samples of
    |m(t) - m(0)| / max(1, |m(0)|).
    """

    times: np.ndarray
    states: np.ndarray
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    drift: dict[str, float] = field(default_factory=dict)
    labels: tuple[str, ...] | None = None

    def __len__(self) -> int:
        return len(self.times)


def monitor_drift(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return 0.0
    ref = values[0]
    return float(np.max(np.abs(values - ref)) / max(1.0, abs(ref)))


def rk4_step(rhs: Rhs, y: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step."""
    if not (dt > 0.0):
        raise DomainError("rk4 step size must be positive")
    y = np.asarray(y, dtype=float)
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    out = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError(f"rk4 produced a non-finite state at t={t}")
    return out


def _dp54_step(rhs: Rhs, t: float, y: np.ndarray, dt: float, k1: np.ndarray):
    """One trial Dormand-Prince step: returns (y5, error_estimate, last_stage)."""
    k = np.empty((7, y.size))
    k[0] = k1
    for i, row in enumerate(_DP_A):
        yi = y + dt * (row @ k[: i + 1])
        k[i + 1] = rhs(t + _DP_C[i + 1] * dt, yi)
    y5 = y + dt * (_DP_B5 @ k)
    err = dt * (_DP_ERR @ k)
    return y5, err, k[6].copy()


class _AdaptiveStepper:
    """Advances a Dormand-Prince integration to requested target times."""

    def __init__(self, rhs: Rhs, y0: np.ndarray, cfg: IntegratorConfig):
        self.rhs = rhs
        self.t = 0.0
        self.y = np.asarray(y0, dtype=float)
        if not np.all(np.isfinite(self.y)):
            raise DivergenceError("initial state is not finite")
        self.cfg = cfg
        self.dt = cfg.dt
        self.k1 = rhs(0.0, self.y)
        if not np.all(np.isfinite(self.k1)):
            raise DivergenceError("derivative is not finite at the initial state")
        self.accepted = 0

    def advance_to(self, t_target: float, on_accept=None) -> None:
        min_step = _MIN_STEP_FRACTION * max(t_target, self.cfg.t_final)
        while self.t < t_target:
            landing = self.dt > t_target - self.t
            dt = min(self.dt, t_target - self.t)
            if dt < min_step:
                raise StiffnessError(f"step underflow at t={self.t}: dt={dt}")
            y_new, err_vec, k_last = _dp54_step(self.rhs, self.t, self.y, dt, self.k1)
            if not np.all(np.isfinite(y_new)):
                # treat an overflowing trial step as rejected and retry smaller
                self.dt = dt * _SHRINK_LIMIT
                continue
            tol = self.cfg.atol + self.cfg.rtol * np.maximum(np.abs(self.y), np.abs(y_new))
            err = float(np.sqrt(np.mean((err_vec / tol) ** 2)))
            if err <= 1.0:
                self.t = self.t + dt
                self.y = y_new
                self.k1 = k_last
                self.accepted += 1
                if on_accept is not None:
                    on_accept(self.t, self.y)
                if landing:
                    # a step shortened to land on the target keeps the
                    # controller's natural step for the next segment
                    continue
            factor = _GROWTH_LIMIT if err == 0.0 else _SAFETY * err ** (-0.2)
            self.dt = dt * min(_GROWTH_LIMIT, max(_SHRINK_LIMIT, factor))


def _finish(times, states, monitors_spec, labels):
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    monitors: dict[str, np.ndarray] = {}
    drift: dict[str, float] = {}
    if monitors_spec:
        for name, fn in monitors_spec.items():
            vals = np.array([fn(t, s) for t, s in zip(times, states)])
            monitors[name] = vals
            drift[name] = monitor_drift(vals)
    return Trajectory(times=times, states=states, monitors=monitors, drift=drift, labels=labels)


def integrate(
    rhs: Rhs,
    y0,
    cfg: IntegratorConfig,
    monitors: dict[str, Monitor] | None = None,
    labels: tuple[str, ...] | None = None,
) -> Trajectory:
    """Integrate dy/dt = rhs(t, y) from t=0 to cfg.t_final.

    Output contains the initial state, every stride-th accepted step and the
    final state exactly at t_final.  Monitors are evaluated at the recorded
    samples only.
    """
    y0 = np.asarray(y0, dtype=float)
    times = [0.0]
    states = [y0.copy()]

    if cfg.method == "rk4":
        t, y = 0.0, y0
        steps = 0
        while t < cfg.t_final:
            dt = min(cfg.dt, cfg.t_final - t)
            y = rk4_step(rhs, y, t, dt)
            t += dt
            steps += 1
            if steps % cfg.stride == 0 or t >= cfg.t_final:
                times.append(t)
                states.append(y.copy())
    else:
        stepper = _AdaptiveStepper(rhs, y0, cfg)

        def record(t, y):
            if stepper.accepted % cfg.stride == 0:
                times.append(t)
                states.append(y.copy())

        stepper.advance_to(cfg.t_final, on_accept=record)
        if times[-1] != stepper.t:
            times.append(stepper.t)
            states.append(stepper.y.copy())

    return _finish(times, states, monitors, labels)


def integrate_at_times(
    rhs: Rhs,
    y0,
    sample_times,
    cfg: IntegratorConfig,
    monitors: dict[str, Monitor] | None = None,
    labels: tuple[str, ...] | None = None,
) -> Trajectory:
    """Integrate recording the state exactly at the given increasing times.

    The first sample time must be 0.  Useful for comparing formulations on a
    common grid and for co-evolving auxiliary quantities along a previously
    computed trajectory.
    """
    sample_times = np.asarray(sample_times, dtype=float)
    if len(sample_times) == 0:
        raise DomainError("sample_times must be non-empty")
    if sample_times[0] != 0.0:
        raise DomainError("sample_times must start at 0")
    if np.any(np.diff(sample_times) <= 0.0):
        raise DomainError("sample_times must be strictly increasing")

    y0 = np.asarray(y0, dtype=float)
    states = [y0.copy()]
    if cfg.method == "rk4":
        t, y = 0.0, y0
        for target in sample_times[1:]:
            while t < target:
                dt = min(cfg.dt, target - t)
                y = rk4_step(rhs, y, t, dt)
                t += dt
            states.append(y.copy())
    else:
        stepper = _AdaptiveStepper(rhs, y0, cfg)
        for target in sample_times[1:]:
            stepper.advance_to(target)
            states.append(stepper.y.copy())

    return _finish(sample_times, states, monitors, labels)
