"""Follower-frame measurements and the lifting dictionaries.

The follower only senses local quantities: the Euclidean distance and
bearing of a target point expressed in a frame aligned with its own last
displacement.  A dictionary choice selects which measurement components
are stacked into the lifted vector the estimator operates on; choices
that predict relative quantities can be inverted back into a chart-plane
move.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, MissingContext, UnsupportedChoice

_TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    r = (a + math.pi) % _TWO_PI - math.pi
    if r == -math.pi:
        r = math.pi
    return r


@dataclass(frozen=True)
class FollowerFrame:
    """Local frame: chart origin plus heading angle of the last move."""

    origin: np.ndarray
    heading_angle: float


def follower_frame(
    prev: Sequence[float], cur: Sequence[float], fallback_angle: float
) -> FollowerFrame:
    """Frame at ``cur`` headed along the displacement from ``prev``.

    Falls back to ``fallback_angle`` when the displacement is too small
    to define a direction.
    """
    dx = float(cur[0]) - float(prev[0])
    dy = float(cur[1]) - float(prev[1])
    if math.hypot(dx, dy) > 1e-12:
        angle = math.atan2(dy, dx)
    else:
        angle = wrap_angle(float(fallback_angle))
    return FollowerFrame(origin=np.array([float(cur[0]), float(cur[1])]), heading_angle=angle)


def relative_measurement(frame: FollowerFrame, target: Sequence[float]) -> tuple:
    """(distance, bearing) of target in the follower frame.

    Distance is the chart-plane Euclidean norm; the bearing lies in
    (-pi, pi] and is 0 by convention when the target coincides with the
    frame origin.
    """
    dx = float(target[0]) - frame.origin[0]
    dy = float(target[1]) - frame.origin[1]
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        return 0.0, 0.0
    return dist, wrap_angle(math.atan2(dy, dx) - frame.heading_angle)


class Dictionary(enum.Enum):
    """Measurement dictionary choices and their lifted dimensions.

    The single-letter values are the tokens used in config files and on
    the command line.
    """

    VELOCITY = "a"
    RELATIVE = "b"
    VELOCITY_RELATIVE = "c"
    FOLLOWER_POS_2D = "d"
    FOLLOWER_POS_3D = "e"
    BOTH_POS_2D = "f"
    BOTH_POS_3D = "g"

    @classmethod
    def parse(cls, token: str) -> "Dictionary":
        try:
            return cls(token.strip().lower())
        except ValueError:
            raise ValueError(f"dictionary must be one of a-g, got {token!r}") from None

    @property
    def dim(self) -> int:
        return _DIMS[self]

    @property
    def relative_slice(self) -> Optional[slice]:
        """Location of the [distance, angle] block, if present."""
        if self is Dictionary.RELATIVE:
            return slice(0, 2)
        if self is Dictionary.VELOCITY_RELATIVE:
            return slice(2, 4)
        return None

    @property
    def uses_velocity(self) -> bool:
        return self in (Dictionary.VELOCITY, Dictionary.VELOCITY_RELATIVE)


_DIMS = {
    Dictionary.VELOCITY: 2,
    Dictionary.RELATIVE: 2,
    Dictionary.VELOCITY_RELATIVE: 4,
    Dictionary.FOLLOWER_POS_2D: 2,
    Dictionary.FOLLOWER_POS_3D: 3,
    Dictionary.BOTH_POS_2D: 4,
    Dictionary.BOTH_POS_3D: 6,
}


@dataclass
class LiftContext:
    """Everything a lift may need for one scenario snapshot.

    Velocities are chart displacements per communication timestep (the
    timestep is the unit of time for moves).  Heights are the surface
    values backing the 3-D position choices.
    """

    frame: Optional[FollowerFrame] = None
    target: Optional[np.ndarray] = None
    follower_velocity: Optional[np.ndarray] = None
    follower_pos: Optional[np.ndarray] = None
    leader_pos: Optional[np.ndarray] = None
    follower_height: Optional[float] = None
    leader_height: Optional[float] = None


def _require(ctx: LiftContext, name: str):
    value = getattr(ctx, name)
    if value is None:
        raise MissingContext(f"lift needs ctx.{name}")
    return value


def lift(choice: Dictionary, ctx: LiftContext) -> np.ndarray:
    """Assemble the lifted measurement vector for one snapshot."""
    parts = []
    if choice.uses_velocity:
        v = _require(ctx, "follower_velocity")
        parts.extend([float(v[0]), float(v[1])])
    if choice.relative_slice is not None:
        frame = _require(ctx, "frame")
        target = _require(ctx, "target")
        parts.extend(relative_measurement(frame, target))
    if choice in (Dictionary.FOLLOWER_POS_2D, Dictionary.FOLLOWER_POS_3D,
                  Dictionary.BOTH_POS_2D, Dictionary.BOTH_POS_3D):
        p = _require(ctx, "follower_pos")
        parts.extend([float(p[0]), float(p[1])])
        if choice in (Dictionary.FOLLOWER_POS_3D, Dictionary.BOTH_POS_3D):
            parts.append(float(_require(ctx, "follower_height")))
        if choice in (Dictionary.BOTH_POS_2D, Dictionary.BOTH_POS_3D):
            q = _require(ctx, "leader_pos")
            parts.extend([float(q[0]), float(q[1])])
            if choice is Dictionary.BOTH_POS_3D:
                parts.append(float(_require(ctx, "leader_height")))
    out = np.array(parts)
    assert len(out) == choice.dim
    return out


def apply_prediction(
    choice: Dictionary, frame: FollowerFrame, predicted: Sequence[float]
) -> np.ndarray:
    """Convert a predicted measurement into the follower's next position.

    Only the local choices define a move: a velocity is executed for one
    timestep, a relative prediction is followed to its endpoint.  The
    absolute-position choices (d-g) are compared directly instead.
    """
    predicted = np.asarray(predicted, dtype=float)
    if predicted.shape != (choice.dim,):
        raise DimensionMismatch(
            f"expected {choice.dim} components for choice {choice.value}, got {predicted.shape}"
        )
    if choice is Dictionary.VELOCITY:
        return frame.origin + predicted
    rel = choice.relative_slice
    if rel is None:
        raise UnsupportedChoice(f"choice {choice.value} does not define a follower move")
    dist, ang = predicted[rel]
    direction = frame.heading_angle + ang
    return frame.origin + dist * np.array([math.cos(direction), math.sin(direction)])
