"""Ideal formation geometry: orthogonal extensions and follower targets.

Each leader carries a rigid extension of fixed Riemannian length d,
orthogonal to its heading in the surface metric.  The extension is
realized by shooting a unit-speed geodesic from the leader state for
parameter time d, so its arclength equals d by construction.  The
extension tip at each communication instant is the follower's ideal
position; chaining the construction yields multi-follower columns.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import DegenerateHeading
from .geodesics import Trajectory, rk4_step, steps_per_period
from .surfaces import Surface, inner


class Side(enum.Enum):
    """Which side of the leader's heading the extension points to.

    LEFT is the counter-clockwise normal in the chart plane.
    """

    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def parse(cls, token: str) -> "Side":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(f"side must be 'left' or 'right', got {token!r}") from None


@dataclass(frozen=True)
class ExtensionSpec:
    """Extension length (Riemannian arclength), side, and comm period."""

    length: float
    side: Side = Side.LEFT
    period: float = 1.28

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("extension length must be > 0")
        if self.period <= 0:
            raise ValueError("communication period must be > 0")


@dataclass
class IdealTrajectory:
    """Follower targets at the communication instants.

    ``positions[k]`` is the extension tip at time ``times[k]`` and
    ``leader_states[k]`` the (position, heading) state it was shot from.
    """

    times: np.ndarray
    positions: np.ndarray
    leader_states: np.ndarray

    def __len__(self):
        return len(self.times)


@dataclass
class ChainFormation:
    """Ideal trajectories for a column of followers (index 0 = first)."""

    agents: List[IdealTrajectory]
    extension: ExtensionSpec


def orthogonal_direction(
    surface: Surface, p: Sequence[float], heading: Sequence[float], side: Side
) -> np.ndarray:
    """Unit tangent orthogonal to ``heading`` in the surface metric.

    The sign is chosen so the chart cross product heading x result is
    positive for LEFT and negative for RIGHT.
    """
    g = surface.metric_at(p)
    hx, hy = float(heading[0]), float(heading[1])
    hh = inner(g, (hx, hy), (hx, hy))
    if hh <= 1e-12:
        raise DegenerateHeading(f"heading {(hx, hy)} has ~zero Riemannian norm")
    # Gram-Schmidt on the CCW chart normal keeps the cross product sign.
    wx, wy = -hy, hx
    c = inner(g, (wx, wy), (hx, hy)) / hh
    vx, vy = wx - c * hx, wy - c * hy
    nrm = math.sqrt(inner(g, (vx, vy), (vx, vy)))
    vx, vy = vx / nrm, vy / nrm
    if side is Side.RIGHT:
        vx, vy = -vx, -vy
    return np.array([vx, vy])


def extension_path(
    surface: Surface, leader_state: Sequence[float], ext: ExtensionSpec, h: float
) -> tuple:
    """Sampled unit-speed geodesic realizing one extension.

    Returns (param_times, states) where states[0] starts at the leader
    position with the orthogonal unit direction and the last sample sits
    at parameter time d exactly (a final partial step covers any
    remainder of d that h does not divide).
    """
    x, y, vx, vy = (float(c) for c in leader_state)
    v0 = orthogonal_direction(surface, (x, y), (vx, vy), ext.side)
    d = ext.length
    n_full = int(math.floor(d / h + 1e-9))
    rem = d - n_full * h
    if rem <= 1e-12:
        rem = 0.0

    state = (x, y, float(v0[0]), float(v0[1]))
    times = [0.0]
    states = [state]
    for i in range(n_full):
        state = rk4_step(surface, state, h)
        times.append((i + 1) * h)
        states.append(state)
    if rem > 0.0:
        state = rk4_step(surface, state, rem)
        times.append(d)
        states.append(state)
    return np.array(times), np.array(states)


def extension_endpoint(
    surface: Surface, leader_state: Sequence[float], ext: ExtensionSpec, h: float
) -> np.ndarray:
    """Chart position of the extension tip (the ideal follower spot)."""
    _, states = extension_path(surface, leader_state, ext, h)
    return states[-1, :2].copy()


def ideal_follower_trajectory(
    surface: Surface, leader_traj: Trajectory, ext: ExtensionSpec
) -> IdealTrajectory:
    """Extension tips at every communication instant k * period."""
    k = steps_per_period(ext.period, leader_traj.step)
    n_periods = (len(leader_traj) - 1) // k
    idx = np.arange(n_periods + 1) * k
    lead_states = leader_traj.states[idx]
    times = leader_traj.times[idx].copy()
    positions = np.array(
        [extension_endpoint(surface, s, ext, leader_traj.step) for s in lead_states]
    )
    return IdealTrajectory(times=times, positions=positions, leader_states=lead_states)


def _difference_headings(positions: np.ndarray, period: float) -> np.ndarray:
    """Per-instant headings from consecutive ideal positions.

    Instant 0 uses the forward difference (the move about to happen);
    later instants use the displacement that led into them.
    """
    n = len(positions)
    headings = np.empty((n, 2))
    for j in range(n):
        a, b = (0, 1) if j == 0 else (j - 1, j)
        delta = positions[b] - positions[a]
        if float(np.hypot(delta[0], delta[1])) <= 1e-12:
            raise DegenerateHeading(f"coincident ideal positions at instants {a} and {b}")
        headings[j] = delta / period
    return headings


def chain_formation(
    surface: Surface, leader_traj: Trajectory, n_followers: int, ext: ExtensionSpec
) -> ChainFormation:
    """Ideal trajectories for a column of followers behind one leader.

    Follower i+1 is built from follower i's ideal trajectory the same
    way follower 1 is built from the leader, with follower headings
    taken from finite differences of their ideal positions.
    """
    if n_followers < 1:
        raise ValueError("need n_followers >= 1")
    agents = [ideal_follower_trajectory(surface, leader_traj, ext)]
    h = leader_traj.step
    for _ in range(1, n_followers):
        prev = agents[-1]
        headings = _difference_headings(prev.positions, ext.period)
        pseudo = np.hstack([prev.positions, headings])
        positions = np.array([extension_endpoint(surface, s, ext, h) for s in pseudo])
        agents.append(
            IdealTrajectory(times=prev.times.copy(), positions=positions, leader_states=pseudo)
        )
    return ChainFormation(agents=agents, extension=ext)


def path_arclength(surface: Surface, times: np.ndarray, states: np.ndarray) -> float:
    """Riemannian length of a sampled curve, sum of speed * dt per step.

    Independent check that unit-speed extension geodesics have length d.
    """
    total = 0.0
    for i in range(len(times) - 1):
        x, y, vx, vy = states[i]
        g = surface.metric_at((x, y))
        speed = math.sqrt(inner(g, (vx, vy), (vx, vy)))
        total += speed * (times[i + 1] - times[i])
    return total
