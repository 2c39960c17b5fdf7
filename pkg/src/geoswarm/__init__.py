"""Leader-follower formation keeping on curved surfaces.

The package simulates a column formation whose leader rides a geodesic
of an arbitrary graph surface while followers hold a fixed Riemannian
offset, and estimates the followers' next measurements with a streaming
least-squares one-step operator fit.
"""

from .config import PRESET_NAMES, load_config, parse_config, preset_config
from .edmd import SnapshotBuffer, fit, predict, pseudoinverse, run_streaming
from .errors import (
    ConfigError,
    DegenerateHeading,
    DimensionMismatch,
    EvaluationError,
    MissingContext,
    NoEstimates,
    NonFiniteState,
    NumericalError,
    SvdFailure,
    UnsupportedChoice,
)
from .formation import (
    ChainFormation,
    ExtensionSpec,
    IdealTrajectory,
    Side,
    chain_formation,
    extension_endpoint,
    extension_path,
    ideal_follower_trajectory,
    orthogonal_direction,
    path_arclength,
)
from .geodesics import (
    Trajectory,
    geodesic_rhs,
    integrate,
    leader_trajectory,
    riemannian_speed,
    steps_per_period,
)
from .observables import (
    Dictionary,
    FollowerFrame,
    LiftContext,
    apply_prediction,
    follower_frame,
    lift,
    relative_measurement,
    wrap_angle,
)
from .scenario import (
    RunReport,
    ScenarioConfig,
    StepRecord,
    VelocityMode,
    build_geometry,
    compare_dictionaries,
    practical_modes,
    rmse,
    run_practical,
    run_scenario,
    sensing_range,
)
from .surfaces import ChristoffelSymbols, MetricTensor, Surface, inner

__version__ = "0.1.0"
