"""Gait generation for the four-limb chassis.

Walking works by yawing a pair of grounded limbs through the shoulder sweep
range while the body advances on a straight line.  Because a yawing limb tip
describes an arc, the limb must shorten its ground projection mid-stroke to
follow the line; this is done by lifting the body with the compensation
angle ``xi``:

    delta(tt)  = 2 * (1 - cos(tt)) * l_ua * cos(t1_init)          (ground plane)
    delta(tt)  = (cos(t1_init) - cos(t1_init + xi)) * l_ua        (vertical plane)
    xi(tt)     = acos((2*cos(tt) - 1) * cos(t1_init)) - t1_init
    t1(t)      = t1_init + xi(t)
    t2(t)      = t2_init - xi(t)

where ``tt`` is the yaw angle to the nearest sweep extreme.  The two forms of
delta are algebraically identical; the compensation is applied verbatim and
the residual gap to the exact straight-line chord geometry is recorded per
tick as a slip diagnostic rather than corrected (mid-stroke the equations
give a radius factor 2*cos(s)-1 where the chord needs cos(s)).

Rotation in place yaws all four shoulders together by pi/6, then returns the
limbs home one at a time.  The mode switch braces the two side limbs forward
and raises the front limb into an arm pose.

The engine is a deterministic state machine advanced by tick(); it holds no
wall-clock or random state, so identical command sequences reproduce
bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from .kinematics import (
    JointAngles,
    KinematicsError,
    LimbGeometry,
    StanceConfig,
    UPPER_ARM_LIMITS,
    FOREARM_LIMITS,
    SHOULDER_YAW_LIMITS,
    check_joint_limits,
    default_stance,
    _fk_unchecked,
    inverse_kinematics,
    wrap_angle,
)

NUM_LIMBS = 4

# Shoulder yaw applied during a rotation-in-place and to the brace limbs in
# manipulation stance.  Equal to the shoulder joint limit.
ROTATION_YAW = math.pi / 6
BRACE_YAW = math.pi / 6

# Raised-arm pose entered by the front limb in manipulation mode.
ARM_HOME = JointAngles(0.0, -math.pi / 6, math.pi / 3)


class GaitError(Exception):
    """Base class for gait failures."""


class GaitConfigError(GaitError):
    """Gait parameters are incompatible with the joint limit box."""


class EngineBusyError(GaitError):
    """A command was issued while a program is still executing."""


class ModeError(GaitError):
    """A command was issued in the wrong robot mode."""


class RobotMode(Enum):
    LOCOMOTION = "locomotion"
    MANIPULATION = "manipulation"


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    LEFT = "left"
    RIGHT = "right"


class RotationDirection(Enum):
    CW = "cw"
    CCW = "ccw"


class PhaseKind(Enum):
    IDLE = "idle"
    PLACE_FORWARD = "place_forward"
    LIFT_AND_PUSH = "lift_and_push"
    RECOVER = "recover"
    ROTATE_PLACE = "rotate_place"
    ROTATE_RECOVER = "rotate_recover"
    MODE_SWITCH = "mode_switch"


@dataclass(frozen=True)
class GaitPhase:
    """Position within the locomotion cycle."""

    kind: PhaseKind
    progress: float = 0.0
    leading_limb: int = 0
    limb_index: Optional[int] = None


@dataclass(frozen=True)
class CompensationState:
    """Per-tick compensation values during the push stroke."""

    theta_tilde: float
    xi: float
    delta: float


# Leading limb per walking direction; the pair of limbs perpendicular to the
# travel direction does the pushing.
DIRECTION_LEADING = {
    Direction.FORWARD: 0,
    Direction.RIGHT: 1,
    Direction.BACKWARD: 2,
    Direction.LEFT: 3,
}

# Travel azimuth in the body frame as a quarter-turn count from +x.
DIRECTION_QUARTER = {
    Direction.FORWARD: 0,
    Direction.LEFT: 1,
    Direction.BACKWARD: 2,
    Direction.RIGHT: 3,
}


def rotate_quarter(x: float, y: float, quarters: int) -> Tuple[float, float]:
    """Rotate a 2-vector by exact multiples of 90 degrees."""
    q = quarters % 4
    if q == 0:
        return (x, y)
    if q == 1:
        return (-y, x)
    if q == 2:
        return (-x, -y)
    return (y, -x)


@dataclass(frozen=True)
class GaitParams:
    """Timing and amplitude parameters of the gait."""

    stance: StanceConfig = field(default_factory=default_stance)
    sweep_limit: float = math.pi / 6
    step_duration: float = 4.0
    rotation_duration: float = 10.0
    mode_switch_duration: float = 15.0
    tick_rate: float = 50.0
    swing_lift: float = 0.15

    def __post_init__(self):
        if not 0.0 < self.sweep_limit <= SHOULDER_YAW_LIMITS[1]:
            raise GaitConfigError(
                "sweep_limit must be in (0, pi/6]; the shoulder joint cannot "
                f"exceed pi/6 (got {self.sweep_limit})"
            )
        for name in ("step_duration", "rotation_duration", "mode_switch_duration"):
            if getattr(self, name) <= 0.0:
                raise GaitConfigError(f"{name} must be > 0")
        if self.tick_rate <= 0.0:
            raise GaitConfigError("tick_rate must be > 0")
        if self.swing_lift < 0.0:
            raise GaitConfigError("swing_lift must be >= 0")
        for name, ticks, div in (
            ("step_duration", self.step_ticks, 4),
            ("rotation_duration", self.rotation_ticks, 5),
            ("mode_switch_duration", self.mode_switch_ticks, 3),
        ):
            seconds = getattr(self, name)
            if abs(seconds * self.tick_rate - ticks) > 1e-9:
                raise GaitConfigError(
                    f"{name} must be a whole number of ticks at "
                    f"{self.tick_rate} Hz"
                )
            if ticks % div != 0:
                raise GaitConfigError(
                    f"{name} must split into {div} equal phases "
                    f"({ticks} ticks is not divisible by {div})"
                )
        validate_feasibility(self)

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    @property
    def step_ticks(self) -> int:
        return round(self.step_duration * self.tick_rate)

    @property
    def rotation_ticks(self) -> int:
        return round(self.rotation_duration * self.tick_rate)

    @property
    def mode_switch_ticks(self) -> int:
        return round(self.mode_switch_duration * self.tick_rate)


def horizontal_shift(theta_tilde: float, params: GaitParams, geom: LimbGeometry) -> float:
    """Ground-plane shift accumulated at yaw distance ``theta_tilde`` from
    the sweep extreme: 2 * (1 - cos(tt)) * l_ua * cos(t1_init)."""
    t1_init = params.stance.initial_upper_arm_pitch
    return 2.0 * (1.0 - math.cos(theta_tilde)) * geom.upper_arm_length * math.cos(t1_init)


def lifting_angle(theta_tilde: float, stance: StanceConfig) -> float:
    """Body-lift angle xi compensating the ground-plane shift.

    Raises GaitConfigError when the acos argument leaves [-1, 1] (geometry
    incompatible with the requested sweep).
    """
    t1_init = stance.initial_upper_arm_pitch
    arg = (2.0 * math.cos(theta_tilde) - 1.0) * math.cos(t1_init)
    if arg < -1.0 or arg > 1.0:
        raise GaitConfigError(
            f"lifting angle undefined: acos argument {arg:.6f} outside [-1, 1]"
        )
    return math.acos(arg) - t1_init


def compensation_at(theta_tilde: float, params: GaitParams, geom: LimbGeometry) -> CompensationState:
    return CompensationState(
        theta_tilde=theta_tilde,
        xi=lifting_angle(theta_tilde, params.stance),
        delta=horizontal_shift(theta_tilde, params, geom),
    )


def stride_length(params: GaitParams, geom: LimbGeometry) -> float:
    """Net body displacement of one full step cycle (the sweep chord)."""
    t1_init = params.stance.initial_upper_arm_pitch
    return 2.0 * geom.upper_arm_length * math.cos(t1_init) * math.sin(params.sweep_limit)


def max_lifting_angle(params: GaitParams) -> float:
    """xi at mid-stroke, where theta_tilde reaches the sweep limit."""
    return lifting_angle(params.sweep_limit, params.stance)


def validate_feasibility(params: GaitParams) -> None:
    """Check every pose the gait programs can emit against the limit box.

    Raises GaitConfigError describing the first offending pose.  A small
    safety margin keeps boundary poses clear of floating-point jitter.
    """
    margin = 1e-9
    t1 = params.stance.initial_upper_arm_pitch
    t2 = params.stance.initial_forearm_pitch
    xi_max = max_lifting_angle(params)
    poses = (
        ("stance upper arm", t1, UPPER_ARM_LIMITS),
        ("stance forearm", t2, FOREARM_LIMITS),
        ("push-stroke upper arm peak", t1 + xi_max, UPPER_ARM_LIMITS),
        ("push-stroke forearm low", t2 - xi_max, FOREARM_LIMITS),
        ("swing-lift upper arm", t1 - params.swing_lift, UPPER_ARM_LIMITS),
        ("arm-home upper arm", ARM_HOME.upper_arm_pitch, UPPER_ARM_LIMITS),
        ("arm-home forearm", ARM_HOME.forearm_pitch, FOREARM_LIMITS),
    )
    for name, value, (lo, hi) in poses:
        if value < lo + margin or value > hi - margin:
            raise GaitConfigError(
                f"{name} reaches {value:.6f} rad, outside safe range "
                f"[{lo + margin:.6f}, {hi - margin:.6f}]; with sweep "
                f"{params.sweep_limit:.4f} rad the standing upper-arm pitch "
                "must satisfy acos((2*cos(sweep)-1)*cos(t1)) <= pi/4"
            )


def _swing_dip(progress: float, lift: float) -> float:
    """Lift profile for an airborne limb: zero at both ends of the phase."""
    return lift * math.sin(math.pi * progress)


def _pusher_limbs(leading: int) -> Tuple[int, int]:
    return ((leading + 1) % 4, (leading + 3) % 4)


def _pusher_start_sign(limb: int, quarter: int) -> float:
    """Initial yaw sign of a pushing limb for the given travel quarter.

    The limb mounted 90 degrees clockwise of the travel direction starts at
    +sweep; its opposite starts at -sweep.  Sweeping toward the opposite
    extreme then moves the body along the travel direction.
    """
    rel = (limb - quarter) % 4
    if rel == 3:
        return 1.0
    if rel == 1:
        return -1.0
    raise ValueError(f"limb {limb} is not a pusher for travel quarter {quarter}")


@dataclass
class LimbTick:
    """Pose of one limb at one tick."""

    joints: JointAngles
    grounded: bool


def step_limb_states(
    phase: GaitPhase, params: GaitParams
) -> List[LimbTick]:
    """Limb poses for a step-cycle phase at the given progress.

    Grounded limbs keep their pitch sum at pi/2; the pushing pair applies the
    compensation system during the push stroke.
    """
    stance = params.stance
    t1_init = stance.initial_upper_arm_pitch
    t2_init = stance.initial_forearm_pitch
    sweep = params.sweep_limit
    leading = phase.leading_limb
    quarter = DIRECTION_QUARTER[_leading_direction(leading)]
    pushers = _pusher_limbs(leading)
    u = phase.progress

    states: List[LimbTick] = []
    for limb in range(NUM_LIMBS):
        if limb in pushers:
            start = _pusher_start_sign(limb, quarter) * sweep
            if phase.kind is PhaseKind.PLACE_FORWARD:
                dip = _swing_dip(u, params.swing_lift)
                q = JointAngles(start * u, t1_init - dip, t2_init)
                grounded = False
            elif phase.kind is PhaseKind.LIFT_AND_PUSH:
                theta0 = start * (1.0 - 2.0 * u)
                tt = sweep - abs(theta0)
                xi = lifting_angle(tt, stance)
                q = JointAngles(theta0, t1_init + xi, t2_init - xi)
                grounded = True
            elif phase.kind is PhaseKind.RECOVER:
                dip = _swing_dip(u, params.swing_lift)
                q = JointAngles(-start * (1.0 - u), t1_init - dip, t2_init)
                grounded = False
            elif phase.kind is PhaseKind.IDLE:
                q = JointAngles(0.0, t1_init, t2_init)
                grounded = True
            else:
                raise ValueError(f"not a step phase: {phase.kind}")
        else:
            if phase.kind is PhaseKind.LIFT_AND_PUSH:
                dip = _swing_dip(u, params.swing_lift)
                q = JointAngles(0.0, t1_init - dip, t2_init)
                grounded = False
            else:
                q = JointAngles(0.0, t1_init, t2_init)
                grounded = True
        states.append(LimbTick(q, grounded))
    return states


def _leading_direction(leading: int) -> Direction:
    for direction, limb in DIRECTION_LEADING.items():
        if limb == leading:
            return direction
    raise ValueError(f"no direction has leading limb {leading}")


def limb_trajectory_for_phase(
    phase: GaitPhase, t: float, params: GaitParams, geom: LimbGeometry
) -> Tuple[JointAngles, JointAngles, JointAngles, JointAngles]:
    """Joint angles of all four limbs at time ``t`` into a step phase.

    ``t`` runs over the phase duration (a quarter of the step for place and
    recover, half for the push stroke).  Raises GaitError when an emitted
    pose leaves the joint limit box, which indicates infeasible parameters.
    """
    durations = {
        PhaseKind.PLACE_FORWARD: params.step_duration / 4.0,
        PhaseKind.LIFT_AND_PUSH: params.step_duration / 2.0,
        PhaseKind.RECOVER: params.step_duration / 4.0,
        PhaseKind.IDLE: params.step_duration,
    }
    if phase.kind not in durations:
        raise ValueError(f"unsupported phase kind {phase.kind}")
    span = durations[phase.kind]
    if not 0.0 <= t <= span:
        raise ValueError(f"t={t} outside phase duration {span}")
    resolved = GaitPhase(phase.kind, t / span, phase.leading_limb, phase.limb_index)
    states = step_limb_states(resolved, params)
    for state in states:
        err = check_joint_limits(state.joints)
        if err is not None:
            raise GaitError(f"trajectory violates joint limits: {err}")
    return tuple(s.joints for s in states)


@dataclass
class SlipSample:
    """Per-tick slip diagnostic for one pushing limb."""

    tick: int
    limb: int
    theta0: float
    radial_residual: float
    slip_distance: float


@dataclass
class TickState:
    """Full kinematic state emitted by the engine after one tick."""

    joints: Tuple[JointAngles, ...]
    grounded: Tuple[bool, ...]
    body_x: float
    body_y: float
    heading: float
    body_height: float
    phase: GaitPhase
    mode: RobotMode


class _Program:
    """One executing command: a pure map from tick index to robot state."""

    kind = "hold"

    def __init__(self, total_ticks: int):
        self.total_ticks = total_ticks

    def apply(self, engine: "GaitEngine", i: int) -> None:
        raise NotImplementedError

    def finish(self, engine: "GaitEngine") -> None:
        pass

    def phase(self, i: int) -> GaitPhase:
        return GaitPhase(PhaseKind.IDLE, i / self.total_ticks)


class _HoldProgram(_Program):
    """Keeps the current posture for a fixed number of ticks."""

    def apply(self, engine: "GaitEngine", i: int) -> None:
        pass


class _StepProgram(_Program):
    kind = "step"

    def __init__(self, engine: "GaitEngine", direction: Direction):
        super().__init__(engine.params.step_ticks)
        self.direction = direction
        self.leading = DIRECTION_LEADING[direction]
        self.quarter = DIRECTION_QUARTER[direction]
        self.place_ticks = self.total_ticks // 4
        self.push_ticks = self.total_ticks // 2
        self.start_x = engine.body_x
        self.start_y = engine.body_y
        stride = stride_length(engine.params, engine.geometries[self.leading])
        hx, hy = math.cos(engine.heading), math.sin(engine.heading)
        ux, uy = rotate_quarter(hx, hy, self.quarter)
        self.travel = (ux, uy)
        self.stride = stride
        self.anchors = {}
        t1 = engine.params.stance.initial_upper_arm_pitch
        for limb in _pusher_limbs(self.leading):
            geom = engine.geometries[limb]
            start_yaw = _pusher_start_sign(limb, self.quarter) * engine.params.sweep_limit
            radius = geom.upper_arm_length * math.cos(t1)
            world_yaw = engine.heading + geom.mount_yaw + start_yaw
            sx, sy = engine._shoulder_world(limb, self.start_x, self.start_y)
            self.anchors[limb] = (
                sx + radius * math.cos(world_yaw),
                sy + radius * math.sin(world_yaw),
            )

    def _resolve(self, i: int) -> GaitPhase:
        if i <= self.place_ticks:
            return GaitPhase(PhaseKind.PLACE_FORWARD, i / self.place_ticks, self.leading)
        if i <= self.place_ticks + self.push_ticks:
            u = (i - self.place_ticks) / self.push_ticks
            return GaitPhase(PhaseKind.LIFT_AND_PUSH, u, self.leading)
        rec = self.total_ticks - self.place_ticks - self.push_ticks
        u = (i - self.place_ticks - self.push_ticks) / rec
        return GaitPhase(PhaseKind.RECOVER, u, self.leading)

    def phase(self, i: int) -> GaitPhase:
        return self._resolve(i)

    def apply(self, engine: "GaitEngine", i: int) -> None:
        phase = self._resolve(i)
        states = step_limb_states(phase, engine.params)
        engine._set_limbs(states)
        if phase.kind is PhaseKind.LIFT_AND_PUSH:
            advance = self.stride * phase.progress
            engine.body_x = self.start_x + advance * self.travel[0]
            engine.body_y = self.start_y + advance * self.travel[1]
            pusher = _pusher_limbs(self.leading)[0]
            t1_now = states[pusher].joints.upper_arm_pitch
            geom = engine.geometries[pusher]
            engine.body_height = (
                geom.upper_arm_length * math.sin(t1_now) + geom.forearm_length
            )
            self._record_slip(engine, i, states)
        else:
            engine.body_x = self.start_x if phase.kind is PhaseKind.PLACE_FORWARD else self.start_x + self.stride * self.travel[0]
            engine.body_y = self.start_y if phase.kind is PhaseKind.PLACE_FORWARD else self.start_y + self.stride * self.travel[1]
            engine.body_height = engine.stance_height()

    def _record_slip(self, engine: "GaitEngine", i: int, states: Sequence[LimbTick]) -> None:
        for limb in _pusher_limbs(self.leading):
            geom = engine.geometries[limb]
            ax, ay = self.anchors[limb]
            sx, sy = engine._shoulder_world(limb, engine.body_x, engine.body_y)
            radial_geo = math.hypot(ax - sx, ay - sy)
            q = states[limb].joints
            radial_eq = geom.upper_arm_length * math.cos(q.upper_arm_pitch)
            fx, fy, _ = engine._foot_world(limb, q)
            engine.slip_log.append(
                SlipSample(
                    tick=engine.tick_count,
                    limb=limb,
                    theta0=q.shoulder_yaw,
                    radial_residual=abs(radial_geo - radial_eq),
                    slip_distance=math.hypot(fx - ax, fy - ay),
                )
            )

    def finish(self, engine: "GaitEngine") -> None:
        engine.body_x = self.start_x + self.stride * self.travel[0]
        engine.body_y = self.start_y + self.stride * self.travel[1]
        engine.body_height = engine.stance_height()
        engine._set_limbs_stance()


class _RotationProgram(_Program):
    kind = "rotation"

    def __init__(self, engine: "GaitEngine", direction: RotationDirection):
        super().__init__(engine.params.rotation_ticks)
        self.direction = direction
        self.delta = ROTATION_YAW if direction is RotationDirection.CCW else -ROTATION_YAW
        self.heading0 = engine.heading
        self.segment = self.total_ticks // 5

    def phase(self, i: int) -> GaitPhase:
        if i <= self.segment:
            return GaitPhase(PhaseKind.ROTATE_PLACE, i / self.segment, 0)
        k = (i - self.segment - 1) // self.segment
        u = (i - self.segment * (k + 1)) / self.segment
        return GaitPhase(PhaseKind.ROTATE_RECOVER, u, 0, limb_index=k)

    def apply(self, engine: "GaitEngine", i: int) -> None:
        stance = engine.params.stance
        t1, t2 = stance.initial_upper_arm_pitch, stance.initial_forearm_pitch
        phase = self.phase(i)
        states = []
        if phase.kind is PhaseKind.ROTATE_PLACE:
            u = phase.progress
            yaw = -self.delta * u
            for limb in range(NUM_LIMBS):
                states.append(LimbTick(JointAngles(yaw, t1, t2), True))
            engine.heading = wrap_angle(self.heading0 + self.delta * u)
        else:
            k = phase.limb_index
            u = phase.progress
            for limb in range(NUM_LIMBS):
                if limb < k:
                    states.append(LimbTick(JointAngles(0.0, t1, t2), True))
                elif limb == k:
                    dip = _swing_dip(u, engine.params.swing_lift)
                    states.append(
                        LimbTick(JointAngles(-self.delta * (1.0 - u), t1 - dip, t2), False)
                    )
                else:
                    states.append(LimbTick(JointAngles(-self.delta, t1, t2), True))
            engine.heading = wrap_angle(self.heading0 + self.delta)
        engine._set_limbs(states)
        engine.body_height = engine.stance_height()

    def finish(self, engine: "GaitEngine") -> None:
        engine.heading = wrap_angle(self.heading0 + self.delta)
        engine._set_limbs_stance()


class _CancelProgram(_Program):
    """Aborts a rotation: restores heading and stance on the next tick."""

    kind = "cancel"

    def __init__(self, heading0: float):
        super().__init__(1)
        self.heading0 = heading0

    def apply(self, engine: "GaitEngine", i: int) -> None:
        engine.heading = self.heading0
        engine._set_limbs_stance()
        engine.body_height = engine.stance_height()


class _ModeSwitchProgram(_Program):
    kind = "mode_switch"

    def __init__(self, engine: "GaitEngine", target: RobotMode):
        super().__init__(engine.params.mode_switch_ticks)
        self.target = target
        self.segment = self.total_ticks // 3
        self.arm_start = engine.joints[0]

    def phase(self, i: int) -> GaitPhase:
        return GaitPhase(PhaseKind.MODE_SWITCH, i / self.total_ticks, 0)

    def apply(self, engine: "GaitEngine", i: int) -> None:
        stance = engine.params.stance
        t1, t2 = stance.initial_upper_arm_pitch, stance.initial_forearm_pitch
        lift = engine.params.swing_lift
        home = JointAngles(0.0, t1, t2)
        if self.target is RobotMode.MANIPULATION:
            if i <= self.segment:
                u = i / self.segment
                front = LimbTick(home, True)
                braces = self._braces(u, _swing_dip(u, lift), t1, t2)
            elif i <= 2 * self.segment:
                u = (i - self.segment) / self.segment
                front = LimbTick(_lerp_joints(home, ARM_HOME, u), False)
                braces = self._braces(1.0, 0.0, t1, t2)
            else:
                front = LimbTick(ARM_HOME, False)
                braces = self._braces(1.0, 0.0, t1, t2)
        else:
            if i <= self.segment:
                u = i / self.segment
                front = LimbTick(_lerp_joints(self.arm_start, home, u), u >= 1.0)
                braces = self._braces(1.0, 0.0, t1, t2)
            elif i <= 2 * self.segment:
                u = (i - self.segment) / self.segment
                front = LimbTick(home, True)
                braces = self._braces(1.0 - u, _swing_dip(u, lift), t1, t2)
            else:
                front = LimbTick(home, True)
                braces = self._braces(0.0, 0.0, t1, t2)
        rear = LimbTick(home, True)
        engine._set_limbs([front, braces[0], rear, braces[1]])
        engine.body_height = engine.stance_height()

    def _braces(self, frac, dip, t1, t2):
        # Limb 1 yaws toward the front limb with a negative angle, limb 3
        # with a positive one; frac runs 0 (home) to 1 (braced).
        grounded = dip == 0.0
        return (
            LimbTick(JointAngles(-BRACE_YAW * frac, t1 - dip, t2), grounded),
            LimbTick(JointAngles(BRACE_YAW * frac, t1 - dip, t2), grounded),
        )

    def finish(self, engine: "GaitEngine") -> None:
        engine.mode = self.target
        stance = engine.params.stance
        t1, t2 = stance.initial_upper_arm_pitch, stance.initial_forearm_pitch
        if self.target is RobotMode.MANIPULATION:
            engine._set_limbs(
                [
                    LimbTick(ARM_HOME, False),
                    LimbTick(JointAngles(-BRACE_YAW, t1, t2), True),
                    LimbTick(JointAngles(0.0, t1, t2), True),
                    LimbTick(JointAngles(BRACE_YAW, t1, t2), True),
                ]
            )
            engine.arm_target = _fk_unchecked(engine.geometries[0], ARM_HOME)
        else:
            engine._set_limbs_stance()
            engine.arm_target = None
        engine.body_height = engine.stance_height()


class _JogProgram(_Program):
    """Moves the raised arm to a new target in a single tick."""

    kind = "jog"

    def __init__(self, joints: Optional[JointAngles], target: Optional[Tuple[float, float, float]]):
        super().__init__(1)
        self.joints = joints
        self.target = target

    @property
    def reach_error(self) -> bool:
        return self.joints is None

    def apply(self, engine: "GaitEngine", i: int) -> None:
        if self.joints is not None:
            limbs = list(engine._limb_states())
            limbs[0] = LimbTick(self.joints, False)
            engine._set_limbs(limbs)
            engine.arm_target = self.target


def _lerp_joints(a: JointAngles, b: JointAngles, u: float) -> JointAngles:
    return JointAngles(
        a.shoulder_yaw + (b.shoulder_yaw - a.shoulder_yaw) * u,
        a.upper_arm_pitch + (b.upper_arm_pitch - a.upper_arm_pitch) * u,
        a.forearm_pitch + (b.forearm_pitch - a.forearm_pitch) * u,
    )


class GaitEngine:
    """Deterministic posture state machine for the four-limb robot.

    One command (step, rotation, mode switch, arm jog, hold) executes at a
    time; tick() advances it and reports completion.  Snapshots returned by
    state() are immutable values safe to share across threads.
    """

    def __init__(
        self,
        geometries: Sequence[LimbGeometry],
        params: GaitParams,
        start_x: float = 0.0,
        start_y: float = 0.0,
        start_heading: float = 0.0,
    ):
        if len(geometries) != NUM_LIMBS:
            raise ValueError(f"expected {NUM_LIMBS} limb geometries")
        validate_feasibility(params)
        self.geometries = list(geometries)
        self.params = params
        self.mode = RobotMode.LOCOMOTION
        self.body_x = start_x
        self.body_y = start_y
        self.heading = wrap_angle(start_heading)
        self.tick_count = 0
        self.arm_target: Optional[Tuple[float, float, float]] = None
        self.slip_log: List[SlipSample] = []
        self._program: Optional[_Program] = None
        self._program_tick = 0
        self._joints: List[JointAngles] = []
        self._grounded: List[bool] = []
        self._set_limbs_stance()
        self.body_height = self.stance_height()

    # -- queries ----------------------------------------------------------

    @property
    def busy(self) -> bool:
        return self._program is not None

    @property
    def joints(self) -> Tuple[JointAngles, ...]:
        return tuple(self._joints)

    @property
    def grounded(self) -> Tuple[bool, ...]:
        return tuple(self._grounded)

    def stance_height(self) -> float:
        stance = self.params.stance
        geom = self.geometries[0]
        return (
            geom.upper_arm_length * math.sin(stance.initial_upper_arm_pitch)
            + geom.forearm_length
        )

    def phase(self) -> GaitPhase:
        if self._program is None:
            return GaitPhase(PhaseKind.IDLE)
        return self._program.phase(self._program_tick)

    def active_kind(self) -> Optional[str]:
        return None if self._program is None else self._program.kind

    def state(self) -> TickState:
        return TickState(
            joints=self.joints,
            grounded=self.grounded,
            body_x=self.body_x,
            body_y=self.body_y,
            heading=self.heading,
            body_height=self.body_height,
            phase=self.phase(),
            mode=self.mode,
        )

    def foot_positions(self) -> List[Tuple[float, float, float]]:
        """World-frame foot positions of all limbs."""
        return [self._foot_world(i, self._joints[i]) for i in range(NUM_LIMBS)]

    def shoulder_position(self, limb: int) -> Tuple[float, float]:
        """World-frame ground projection of a limb's shoulder joint."""
        return self._shoulder_world(limb, self.body_x, self.body_y)

    def arm_end_effector(self) -> Tuple[float, float, float]:
        """World-frame end-effector position of the front limb."""
        return self._foot_world(0, self._joints[0])

    def reach_disk(self) -> Tuple[float, float, float]:
        """Center and radius of the front limb's ground reach disk."""
        sx, sy = self._shoulder_world(0, self.body_x, self.body_y)
        geom = self.geometries[0]
        height = self.body_height + geom.shoulder_offset[2]
        reach_sq = geom.max_reach ** 2 - height ** 2
        return (sx, sy, math.sqrt(reach_sq) if reach_sq > 0.0 else 0.0)

    # -- command entry points ----------------------------------------------

    def begin_step(self, direction: Direction) -> None:
        self._require_idle()
        if self.mode is not RobotMode.LOCOMOTION:
            raise ModeError("steps require locomotion mode")
        self._start(_StepProgram(self, direction))

    def begin_rotation(self, direction: RotationDirection) -> None:
        self._require_idle()
        if self.mode is not RobotMode.LOCOMOTION:
            raise ModeError("rotation requires locomotion mode")
        self._start(_RotationProgram(self, direction))

    def begin_mode_switch(self, target: RobotMode) -> None:
        self._require_idle()
        if target is self.mode:
            # Already there: no choreography, done on the next tick.
            self._start(_HoldProgram(1))
            return
        self._start(_ModeSwitchProgram(self, target))

    def begin_jog(self, dx: float, dy: float, dz: float) -> bool:
        """Queue a one-tick arm move; returns False when IK rejects it."""
        self._require_idle()
        if self.mode is not RobotMode.MANIPULATION or self.arm_target is None:
            raise ModeError("arm jogs require manipulation mode")
        tx, ty, tz = self.arm_target
        target = (tx + dx, ty + dy, tz + dz)
        try:
            joints = inverse_kinematics(self.geometries[0], target, self.params.stance)
        except KinematicsError:
            self._start(_JogProgram(None, None))
            return False
        self._start(_JogProgram(joints, target))
        return True

    def begin_hold(self, ticks: int) -> None:
        self._require_idle()
        self._start(_HoldProgram(ticks))

    def cancel_rotation(self) -> None:
        """Abort an executing rotation, restoring heading and stance."""
        if not isinstance(self._program, _RotationProgram):
            raise GaitError("no rotation in progress")
        heading0 = self._program.heading0
        self._program = _CancelProgram(heading0)
        self._program_tick = 0

    # -- ticking ------------------------------------------------------------

    def tick(self) -> bool:
        """Advance one tick; returns True when a program completed."""
        self.tick_count += 1
        if self._program is None:
            return False
        self._program_tick += 1
        self._program.apply(self, self._program_tick)
        self._check_limits()
        if self._program_tick >= self._program.total_ticks:
            self._program.finish(self)
            self._check_limits()
            self._program = None
            self._program_tick = 0
            return True
        return False

    # -- internals -----------------------------------------------------------

    def _require_idle(self) -> None:
        if self._program is not None:
            raise EngineBusyError("a command is already executing")

    def _start(self, program: _Program) -> None:
        if isinstance(program, _StepProgram):
            self.slip_log = []
        self._program = program
        self._program_tick = 0

    def _set_limbs(self, states: Sequence[LimbTick]) -> None:
        self._joints = [s.joints for s in states]
        self._grounded = [s.grounded for s in states]

    def _limb_states(self) -> List[LimbTick]:
        return [
            LimbTick(self._joints[i], self._grounded[i]) for i in range(NUM_LIMBS)
        ]

    def _set_limbs_stance(self) -> None:
        stance = self.params.stance
        q = JointAngles(
            0.0, stance.initial_upper_arm_pitch, stance.initial_forearm_pitch
        )
        self._joints = [q] * NUM_LIMBS
        self._grounded = [True] * NUM_LIMBS

    def _check_limits(self) -> None:
        for limb, q in enumerate(self._joints):
            err = check_joint_limits(q)
            if err is not None:
                raise GaitError(
                    f"limb {limb} left the joint limit box ({err}); "
                    "gait parameters are infeasible"
                )

    def _shoulder_world(self, limb: int, bx: float, by: float) -> Tuple[float, float]:
        ox, oy, _ = self.geometries[limb].shoulder_offset
        ch, sh = math.cos(self.heading), math.sin(self.heading)
        return (bx + ch * ox - sh * oy, by + sh * ox + ch * oy)

    def _foot_world(self, limb: int, q: JointAngles) -> Tuple[float, float, float]:
        fx, fy, fz = _fk_unchecked(self.geometries[limb], q)
        ch, sh = math.cos(self.heading), math.sin(self.heading)
        return (
            self.body_x + ch * fx - sh * fy,
            self.body_y + sh * fx + ch * fy,
            self.body_height + fz,
        )
