"""Scenario execution and the comparison studies built on top of it.

A scenario couples a leader geodesic on a surface with one follower
holding formation at the tip of the leader's orthogonal extension.  At
every communication instant t the follower, sitting at the previous tip,
measures the new tip; the streaming estimator predicts that measurement
one step ahead.  Standard runs correct the follower onto the actual tip
after every step, so estimates are scored against ideal positions while
the data stream stays exact.  Practical runs instead accumulate the
executed moves, letting estimation error feed back into the data.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import edmd
from .errors import ConfigError, NoEstimates
from .formation import ExtensionSpec, IdealTrajectory, Side, ideal_follower_trajectory
from .geodesics import Trajectory, leader_trajectory, steps_per_period
from .observables import (
    Dictionary,
    FollowerFrame,
    LiftContext,
    apply_prediction,
    follower_frame,
    lift,
    relative_measurement,
)
from .surfaces import Surface


class VelocityMode(enum.Enum):
    """How the velocity slot of the combined dictionary is filled.

    NONE drops velocity entirely (relative-position-only dictionary);
    LAG reuses the previous timestep's executed velocity; EDMD predicts
    the current velocity with a separate streaming estimator fed by the
    executed velocity history.
    """

    NONE = "none"
    LAG = "lag"
    EDMD = "edmd-on-velocity"

    @classmethod
    def parse(cls, token: str) -> "VelocityMode":
        t = token.strip().lower()
        for mode in cls:
            if t == mode.value or t == mode.name.lower():
                return cls(mode.value)
        raise ValueError(f"unknown velocity mode {token!r}")


@dataclass
class ScenarioConfig:
    surface: Surface
    leader_init: np.ndarray
    extension: ExtensionSpec
    dictionary: Dictionary = Dictionary.RELATIVE
    warmup: int = 4
    steps: int = 36
    velocity_mode: VelocityMode = VelocityMode.NONE
    step: float = 0.01

    def validate(self) -> "ScenarioConfig":
        init = np.asarray(self.leader_init, dtype=float).reshape(-1)
        if init.shape != (4,) or not np.all(np.isfinite(init)):
            raise ConfigError("leader.init must be four finite numbers [x, y, vx, vy]")
        self.leader_init = init
        if self.warmup < 1:
            raise ConfigError("edmd.warmup must be >= 1")
        if self.steps <= self.warmup:
            raise ConfigError("edmd.steps must exceed edmd.warmup")
        if self.step <= 0:
            raise ConfigError("integrator.step must be > 0")
        try:
            steps_per_period(self.extension.period, self.step)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.velocity_mode is not VelocityMode.NONE and (
            self.dictionary is not Dictionary.VELOCITY_RELATIVE
        ):
            raise ConfigError("velocity modes other than 'none' require dictionary c")
        return self

    def echo(self) -> dict:
        """Config serialized in the layout of the config file schema."""
        return {
            "surface": {"kind": self.surface.kind},
            "leader": {"init": [float(c) for c in self.leader_init]},
            "extension": {
                "length": float(self.extension.length),
                "period": float(self.extension.period),
                "side": self.extension.side.value,
            },
            "edmd": {
                "dictionary": self.dictionary.value,
                "warmup": int(self.warmup),
                "steps": int(self.steps),
                "velocity_mode": self.velocity_mode.value,
            },
            "integrator": {"step": float(self.step)},
        }


@dataclass
class StepRecord:
    """One communication event as seen by the follower."""

    t: int
    ideal: np.ndarray
    follower: np.ndarray
    measurement: np.ndarray
    meas_rel: Tuple[float, float]
    estimated: Optional[np.ndarray] = None
    prediction: Optional[np.ndarray] = None
    pred_rel: Optional[Tuple[float, float]] = None


@dataclass
class RunReport:
    records: List[StepRecord]
    rmse: float
    avg_sensing_range: float
    config: dict
    geometry: Optional["ScenarioGeometry"] = field(default=None, repr=False)


@dataclass
class ScenarioGeometry:
    """Leader path and formation targets shared by runs of one scenario."""

    surface: Surface
    leader: Trajectory
    ideal: IdealTrajectory
    initial_heading: float


def build_geometry(cfg: ScenarioConfig) -> ScenarioGeometry:
    cfg.validate()
    leader = leader_trajectory(
        cfg.surface, cfg.leader_init, cfg.steps, cfg.extension.period, cfg.step
    )
    ideal = ideal_follower_trajectory(cfg.surface, leader, cfg.extension)
    heading0 = math.atan2(float(cfg.leader_init[3]), float(cfg.leader_init[2]))
    return ScenarioGeometry(
        surface=cfg.surface, leader=leader, ideal=ideal, initial_heading=heading0
    )


def _frames_along(positions: np.ndarray, initial_heading: float, count: int) -> list:
    """Frames at events 0..count-1 for a follower walking ``positions``.

    The frame at event t sits on the position reached at event t-1 with
    the heading of the displacement into it; events 0 and 1 have no
    displacement history and use the initial heading.
    """
    frames = [FollowerFrame(origin=positions[0].copy(), heading_angle=initial_heading)]
    for t in range(1, count):
        if t == 1:
            frames.append(FollowerFrame(origin=positions[0].copy(), heading_angle=initial_heading))
        else:
            frames.append(
                follower_frame(positions[t - 2], positions[t - 1], frames[-1].heading_angle)
            )
    return frames


def _step_velocities(positions: np.ndarray) -> np.ndarray:
    """Per-timestep chart displacements, zero at event 0."""
    vel = np.zeros_like(positions)
    vel[1:] = positions[1:] - positions[:-1]
    return vel


def _ideal_measurements(cfg: ScenarioConfig, geom: ScenarioGeometry) -> tuple:
    """Lifted measurement per event for a follower held on formation."""
    p = geom.ideal.positions
    n_events = len(p)
    frames = _frames_along(p, geom.initial_heading, n_events)
    vel = _step_velocities(p)
    leader_pos = geom.ideal.leader_states[:, :2]
    surface = geom.surface
    needs_heights = cfg.dictionary in (Dictionary.FOLLOWER_POS_3D, Dictionary.BOTH_POS_3D)
    lifted = []
    for t in range(n_events):
        ctx = LiftContext(
            frame=frames[t],
            target=p[t],
            follower_velocity=vel[t],
            follower_pos=p[t],
            leader_pos=leader_pos[t],
            follower_height=surface.height(p[t]) if needs_heights else None,
            leader_height=surface.height(leader_pos[t]) if needs_heights else None,
        )
        lifted.append(lift(cfg.dictionary, ctx))
    return frames, lifted


def _estimate_position(choice: Dictionary, frame: FollowerFrame, prediction: np.ndarray):
    if choice.relative_slice is not None or choice is Dictionary.VELOCITY:
        return apply_prediction(choice, frame, prediction)
    return np.asarray(prediction[:2], dtype=float)


def _pred_rel(choice: Dictionary, prediction: np.ndarray):
    sl = choice.relative_slice
    if sl is None:
        return None
    block = prediction[sl]
    return float(block[0]), float(block[1])


def run_scenario(cfg: ScenarioConfig, geometry: Optional[ScenarioGeometry] = None) -> RunReport:
    """Standard run: estimate each measurement, then correct onto the tip.

    Estimated positions are kept for scoring only; the data stream is
    generated with the follower exactly on formation at every event.
    """
    geom = geometry if geometry is not None else build_geometry(cfg)
    frames, lifted = _ideal_measurements(cfg, geom)
    p = geom.ideal.positions

    pairs = [(lifted[t], lifted[t + 1]) for t in range(cfg.warmup)]
    feed = iter(lifted[cfg.warmup + 1 :])
    results = edmd.run_streaming(pairs, cfg.steps, lambda _pred: next(feed))

    records = []
    for t in range(1, cfg.steps + 1):
        rec = StepRecord(
            t=t,
            ideal=p[t].copy(),
            follower=frames[t].origin.copy(),
            measurement=lifted[t],
            meas_rel=relative_measurement(frames[t], p[t]),
        )
        if t > cfg.warmup:
            prediction, _actual = results[t - cfg.warmup - 1]
            rec.prediction = prediction
            rec.pred_rel = _pred_rel(cfg.dictionary, prediction)
            rec.estimated = _estimate_position(cfg.dictionary, frames[t], prediction)
        records.append(rec)

    return RunReport(
        records=records,
        rmse=rmse(records),
        avg_sensing_range=_mean_estimate_distance(records),
        config=cfg.echo(),
        geometry=geom,
    )


def run_practical(cfg: ScenarioConfig, geometry: Optional[ScenarioGeometry] = None) -> RunReport:
    """Executed-movement run: the follower accumulates its own moves.

    Unlike the standard run, nothing pulls the follower back onto the
    formation after warmup: each prediction step it executes one
    displacement to the position its estimate commands, measures the
    true tip from wherever that left it, and books the executed
    displacement as its velocity data.  Estimation error therefore feeds
    back into both the measurement stream and the velocity record, the
    accumulating discrepancy that makes velocity-bearing dictionaries
    impractical.  The velocity slot of dictionary c is filled from the
    executed record per cfg.velocity_mode.
    """
    geom = geometry if geometry is not None else build_geometry(cfg)
    p = geom.ideal.positions
    choice = cfg.dictionary
    mode = cfg.velocity_mode
    n_events = cfg.steps + 1

    # Executed world state; on formation through the warmup events.
    q = [p[0].copy()]
    frames = [FollowerFrame(origin=p[0].copy(), heading_angle=geom.initial_heading)]
    vel = [np.zeros(2)]

    aux = edmd.SnapshotBuffer(2) if mode is VelocityMode.EDMD else None

    def velocity_slot(t: int) -> np.ndarray:
        if mode is VelocityMode.LAG or (aux is not None and aux.m < cfg.warmup):
            return vel[t - 1]
        return edmd.predict(edmd.fit(aux), aux.last_y)

    def assemble(t: int, frame: FollowerFrame) -> np.ndarray:
        ctx = LiftContext(frame=frame, target=p[t])
        if choice.uses_velocity:
            ctx.follower_velocity = velocity_slot(t)
        return lift(choice, ctx)

    def advance(t: int, position: np.ndarray):
        q.append(np.asarray(position, dtype=float))
        vel.append(q[t] - q[t - 1])
        if aux is not None:
            if aux.m == 0:
                aux.append_pair(vel[t - 1], vel[t])
            else:
                aux.stream_step(vel[t])

    def next_frame(t: int) -> FollowerFrame:
        if t == 1:
            return FollowerFrame(origin=q[0].copy(), heading_angle=geom.initial_heading)
        return follower_frame(q[t - 2], q[t - 1], frames[-1].heading_angle)

    lifted = [assemble(0, frames[0])]  # event 0: coincident follower and tip
    records = []
    for t in range(1, cfg.warmup + 1):
        frame = next_frame(t)
        frames.append(frame)
        lifted.append(assemble(t, frame))
        advance(t, p[t])
        records.append(
            StepRecord(
                t=t,
                ideal=p[t].copy(),
                follower=frame.origin.copy(),
                measurement=lifted[t],
                meas_rel=relative_measurement(frame, p[t]),
            )
        )

    def oracle(prediction: np.ndarray) -> np.ndarray:
        t = len(q)  # next event index
        frame = next_frame(t)
        frames.append(frame)
        estimated = apply_prediction(choice, frame, prediction)
        measurement = assemble(t, frame)
        advance(t, estimated)
        records.append(
            StepRecord(
                t=t,
                ideal=p[t].copy(),
                follower=frame.origin.copy(),
                measurement=measurement,
                meas_rel=relative_measurement(frame, p[t]),
                estimated=estimated,
                prediction=prediction,
                pred_rel=_pred_rel(choice, prediction),
            )
        )
        return measurement

    pairs = [(lifted[t], lifted[t + 1]) for t in range(cfg.warmup)]
    edmd.run_streaming(pairs, cfg.steps, oracle)
    assert len(q) == n_events

    return RunReport(
        records=records,
        rmse=rmse(records),
        avg_sensing_range=_mean_estimate_distance(records),
        config=cfg.echo(),
        geometry=geom,
    )


def _estimate_errors(records: Sequence[StepRecord]) -> np.ndarray:
    errors = [
        float(np.hypot(*(r.estimated - r.ideal))) for r in records if r.estimated is not None
    ]
    if not errors:
        raise NoEstimates("no records carry estimated positions")
    return np.array(errors)


def rmse(records: Sequence[StepRecord]) -> float:
    """Root mean squared estimate-to-ideal distance over prediction steps."""
    errors = _estimate_errors(records)
    return float(np.sqrt(np.mean(errors**2)))


def _mean_estimate_distance(records: Sequence[StepRecord]) -> float:
    return float(np.mean(_estimate_errors(records)))


def sensing_range(
    cfg: ScenarioConfig,
    with_estimation: bool,
    geometry: Optional[ScenarioGeometry] = None,
) -> float:
    """Average distance from the follower's reference point to the tip.

    With estimation the reference is the estimated position; without it
    the follower has no guidance and the reference is its previous
    position (the previous tip).  Both averages run over the prediction
    events so the two numbers are directly comparable.
    """
    geom = geometry if geometry is not None else build_geometry(cfg)
    if with_estimation:
        return run_scenario(cfg, geom).avg_sensing_range
    p = geom.ideal.positions
    gaps = [
        float(np.hypot(*(p[t] - p[t - 1]))) for t in range(cfg.warmup + 1, cfg.steps + 1)
    ]
    return float(np.mean(gaps))


def compare_dictionaries(
    cfg: ScenarioConfig, choices: Sequence[Dictionary]
) -> List[Tuple[Dictionary, float]]:
    """RMSE per dictionary choice on one shared scenario geometry."""
    if not choices:
        raise ValueError("need at least one dictionary choice")
    geom = build_geometry(cfg)
    rows = []
    for choice in choices:
        run_cfg = dataclasses.replace(cfg, dictionary=choice, velocity_mode=VelocityMode.NONE)
        rows.append((choice, run_scenario(run_cfg, geom).rmse))
    return rows


PRACTICAL_MODES = (VelocityMode.NONE, VelocityMode.LAG, VelocityMode.EDMD)


def practical_modes(cfg: ScenarioConfig) -> List[Tuple[VelocityMode, float]]:
    """RMSE of the three practically acquirable dictionary variants.

    The relative-position-only variant needs no velocity record, so it
    runs as the standard corrected scenario.  The two velocity-bearing
    variants can only obtain velocity data from executed movement and
    therefore run under the accumulating executed-movement regime.
    """
    geom = build_geometry(cfg)
    rows = []
    for mode in PRACTICAL_MODES:
        if mode is VelocityMode.NONE:
            run_cfg = dataclasses.replace(
                cfg, dictionary=Dictionary.RELATIVE, velocity_mode=mode
            )
            rows.append((mode, run_scenario(run_cfg, geom).rmse))
        else:
            run_cfg = dataclasses.replace(
                cfg, dictionary=Dictionary.VELOCITY_RELATIVE, velocity_mode=mode
            )
            rows.append((mode, run_practical(run_cfg, geom).rmse))
    return rows
