"""Kinematic simulator and gesture teleoperation stack for a four-limb
walking/manipulating robot chassis."""

from .config import RobotConfig, WorldParams, default_config, load_config
from .gait import (
    CompensationState,
    Direction,
    GaitEngine,
    GaitParams,
    GaitPhase,
    PhaseKind,
    RobotMode,
    RotationDirection,
    horizontal_shift,
    lifting_angle,
    limb_trajectory_for_phase,
    stride_length,
)
from .kinematics import (
    JointAngles,
    JointLimitError,
    LimbGeometry,
    OutOfReachError,
    StanceConfig,
    check_stance_constraint,
    forward_kinematics,
    inverse_kinematics,
)
from .scenario import (
    RunResult,
    Scenario,
    ScenarioMetrics,
    plan_reference_script,
    run_scripted,
    segment_metrics,
)
from .teleop import (
    Axis,
    Command,
    CommandKind,
    Hand,
    HandSample,
    SessionState,
    SubmitResult,
    TeleopParams,
    map_gesture,
)
from .world import BallState, BodyPose, Simulation, WorldState

__version__ = "0.1.0"
