"""Fixed-step integration of the geodesic equation on a graph surface.

The second-order geodesic equation is integrated as the first-order
system over the state [x, y, vx, vy]:

    dx/dt  = vx                dvx/dt = -G^x_ij v^i v^j
    dy/dt  = vy                dvy/dt = -G^y_ij v^i v^j

with the classical fourth-order Runge-Kutta scheme.  Every stage checks
for non-finite values so pathological custom surfaces fail fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonFiniteState
from .surfaces import Surface

DEFAULT_STEP = 0.01


@dataclass
class Trajectory:
    """Uniformly sampled integrator output.

    ``states`` has one row per sample with columns (x, y, vx, vy) and
    ``times[i] == i * step``.
    """

    times: np.ndarray
    states: np.ndarray
    step: float

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def index_of(self, t: float) -> int:
        """Sample index for time t, which must land on the grid."""
        i = int(round(t / self.step))
        if i < 0 or i >= len(self.times) or abs(i * self.step - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"time {t} is not a sample of this trajectory")
        return i

    def state_at(self, t: float) -> np.ndarray:
        return self.states[self.index_of(t)]

    def at_times(self, ts: Sequence[float]) -> np.ndarray:
        """States at several grid times, e.g. communication instants."""
        return np.array([self.state_at(t) for t in ts])


def geodesic_rhs(surface: Surface, state: Sequence[float]) -> np.ndarray:
    """Time derivative (vx, vy, ax, ay) of a geodesic state."""
    x, y, vx, vy = (float(c) for c in state)
    ax, ay = _acceleration(surface, x, y, vx, vy)
    return np.array([vx, vy, ax, ay])


def _acceleration(surface, x, y, vx, vy):
    gxxx, gxxy, gxyy, gyxx, gyxy, gyyy = surface.gamma_terms(x, y)
    ax = -(gxxx * vx * vx + 2.0 * gxxy * vx * vy + gxyy * vy * vy)
    ay = -(gyxx * vx * vx + 2.0 * gyxy * vx * vy + gyyy * vy * vy)
    if not (math.isfinite(ax) and math.isfinite(ay)):
        raise NonFiniteState(f"non-finite acceleration at ({x}, {y})")
    return ax, ay


def rk4_step(surface: Surface, state: tuple, h: float) -> tuple:
    """One classical Runge-Kutta step of size h on a plain-float state."""
    x, y, vx, vy = state

    a1x, a1y = _acceleration(surface, x, y, vx, vy)
    k1 = (vx, vy, a1x, a1y)

    s2 = (x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], vx + 0.5 * h * k1[2], vy + 0.5 * h * k1[3])
    a2x, a2y = _acceleration(surface, *s2)
    k2 = (s2[2], s2[3], a2x, a2y)

    s3 = (x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], vx + 0.5 * h * k2[2], vy + 0.5 * h * k2[3])
    a3x, a3y = _acceleration(surface, *s3)
    k3 = (s3[2], s3[3], a3x, a3y)

    s4 = (x + h * k3[0], y + h * k3[1], vx + h * k3[2], vy + h * k3[3])
    a4x, a4y = _acceleration(surface, *s4)
    k4 = (s4[2], s4[3], a4x, a4y)

    c = h / 6.0
    out = (
        x + c * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y + c * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        vx + c * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        vy + c * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    )
    if not all(math.isfinite(c) for c in out):
        raise NonFiniteState(f"non-finite state after step from ({x}, {y})")
    return out


def _integrate_n(surface: Surface, s0, n_steps: int, h: float) -> Trajectory:
    state = tuple(float(c) for c in s0)
    if not all(math.isfinite(c) for c in state):
        raise ValueError("initial state must be finite")
    states = np.empty((n_steps + 1, 4))
    states[0] = state
    for i in range(n_steps):
        state = rk4_step(surface, state, h)
        states[i + 1] = state
    times = np.arange(n_steps + 1) * h
    return Trajectory(times=times, states=states, step=h)


def integrate(surface: Surface, s0, duration: float, h: float = DEFAULT_STEP) -> Trajectory:
    """Integrate for the given duration with fixed step h.

    Samples lie at t = 0, h, 2h, ...; the number of steps is rounded so
    the final time is within h/2 of the requested duration.
    """
    if duration <= 0 or h <= 0 or h > duration:
        raise ValueError("need duration > 0 and 0 < h <= duration")
    n = max(1, int(round(duration / h)))
    return _integrate_n(surface, s0, n, h)


def steps_per_period(period: float, h: float) -> int:
    """Number of integrator steps per communication period.

    The step must divide the period; mismatches are rejected rather than
    interpolated.
    """
    if period <= 0 or h <= 0:
        raise ValueError("need period > 0 and h > 0")
    k = int(round(period / h))
    if k < 1 or abs(k * h - period) > 1e-12:
        raise ValueError(f"step {h} does not divide period {period}")
    return k


def leader_trajectory(
    surface: Surface, s0, n_periods: int, period: float, h: float = DEFAULT_STEP
) -> Trajectory:
    """Geodesic leader path over n_periods communication periods.

    The returned trajectory is sampled every h; the states at the
    communication instants k * period are exact grid samples, reachable
    via :meth:`Trajectory.state_at`.
    """
    if n_periods < 1:
        raise ValueError("need n_periods >= 1")
    k = steps_per_period(period, h)
    return _integrate_n(surface, s0, n_periods * k, h)


def riemannian_speed(surface: Surface, state: Sequence[float]) -> float:
    """Norm of the velocity in the surface metric."""
    x, y, vx, vy = (float(c) for c in state)
    g = surface.metric_at((x, y))
    return math.sqrt(g.g11 * vx * vx + 2.0 * g.g12 * vx * vy + g.g22 * vy * vy)
