"""Kinematic world model: robot, ball, box and trial bookkeeping.

The simulation advances in fixed ticks.  Each tick the active command's
trajectory progresses, a held ball rides the end-effector, and a released
ball settles instantly onto the ground or into the box (no projectile
dynamics; only where the ball ends up matters).  A trial fails when a
released ball settles outside the front limb's reach disk, which resets the
ball to its scenario position and increments the trial counter.

Everything is deterministic: the clock is an integer tick count, and
replaying the same command sequence reproduces the final state bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from .config import RobotConfig
from .gait import GaitEngine, RobotMode
from .teleop import (
    Axis,
    Command,
    CommandKind,
    ROTATION_DIRECTIONS,
    STEP_DIRECTIONS,
    SessionState,
    SubmitResult,
    evaluate_submission,
)

SNAPSHOT_VERSION = 1


class BallState(Enum):
    ON_GROUND = "on_ground"
    HELD = "held"
    IN_BOX = "in_box"


@dataclass(frozen=True)
class BodyPose:
    """Chassis pose on the ground plane."""

    x: float
    y: float
    heading: float
    height: float


@dataclass(frozen=True)
class Event:
    """One entry of the run event log."""

    t: float
    kind: str
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"t": self.t, "kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class FailureEvent:
    """A released ball settled outside the reach disk."""

    ball_position: Tuple[float, float, float]
    reach_center: Tuple[float, float]
    reach_radius: float
    distance: float


@dataclass(frozen=True)
class WorldState:
    """Immutable world snapshot used for replay comparison."""

    clock: float
    tick_count: int
    mode: RobotMode
    busy: bool
    body: BodyPose
    joints: tuple
    ball_position: Tuple[float, float, float]
    ball_state: BallState
    gripper_closed: bool
    trial_count: int
    success: bool


@dataclass(frozen=True)
class ScenarioLayout:
    """Static scene: start pose, ball spawn and box position."""

    robot_start: Tuple[float, float]
    robot_heading: float
    ball_start: Tuple[float, float]
    box_position: Tuple[float, float]


class Simulation:
    """Owns the gait engine, the teleop session and the scene objects."""

    def __init__(self, config: RobotConfig, layout: ScenarioLayout):
        self.config = config
        self.layout = layout
        self.engine = GaitEngine(
            config.limbs,
            config.gait,
            start_x=layout.robot_start[0],
            start_y=layout.robot_start[1],
            start_heading=layout.robot_heading,
        )
        self.session = SessionState(mode=self.engine.mode)
        self.tick_count = 0
        self.trial_count = 1
        self.gripper_closed = False
        self.success = False
        self.events: List[Event] = []
        ball_z = config.world.ball_radius
        self.ball_position: Tuple[float, float, float] = (
            layout.ball_start[0],
            layout.ball_start[1],
            ball_z,
        )
        self.ball_state = BallState.ON_GROUND
        self._pending_settle = False
        self._jog_ok = True

    # -- clock --------------------------------------------------------------

    @property
    def tick_rate(self) -> float:
        return self.config.gait.tick_rate

    @property
    def clock(self) -> float:
        """Simulated seconds; exactly tick_count / tick_rate."""
        return self.tick_count / self.tick_rate

    # -- command intake -------------------------------------------------------

    def submit(self, cmd: Command) -> SubmitResult:
        """Admit or reject a command; acceptance starts it immediately."""
        result = evaluate_submission(cmd, self.session)
        if result is not SubmitResult.ACCEPTED:
            self._log("command_rejected", command=cmd.label(), reason=result.value)
            return result
        if self.session.busy:
            # Only a rotation cancel reaches this point while busy.
            self._log(
                "command_done",
                command=self.session.active_command.label(),
                aborted=True,
            )
            self.engine.cancel_rotation()
        else:
            self._begin(cmd)
        self.session.activate(cmd)
        self._log("command_accepted", command=cmd.label())
        return result

    def _begin(self, cmd: Command) -> None:
        kind = cmd.kind
        if kind in STEP_DIRECTIONS:
            self.engine.begin_step(STEP_DIRECTIONS[kind])
        elif kind in ROTATION_DIRECTIONS:
            self.engine.begin_rotation(ROTATION_DIRECTIONS[kind])
        elif kind is CommandKind.SWITCH_MODE:
            target = (
                RobotMode.MANIPULATION
                if self.engine.mode is RobotMode.LOCOMOTION
                else RobotMode.LOCOMOTION
            )
            self.engine.begin_mode_switch(target)
        elif kind is CommandKind.CANCEL_ROTATION:
            self.engine.begin_hold(1)
        elif kind in (CommandKind.GRIPPER_OPEN, CommandKind.GRIPPER_CLOSE):
            self.engine.begin_hold(self.grasp_ticks())
        elif kind is CommandKind.ARM_JOG:
            step = self.config.teleop.jog_distance * cmd.sign
            delta = {
                Axis.X: (step, 0.0, 0.0),
                Axis.Y: (0.0, step, 0.0),
                Axis.Z: (0.0, 0.0, step),
            }[cmd.axis]
            self._jog_ok = self.engine.begin_jog(*delta)
        else:
            raise ValueError(f"unhandled command kind {kind}")

    def grasp_ticks(self) -> int:
        ticks = round(self.config.teleop.grasp_duration * self.tick_rate)
        return max(1, ticks)

    def command_duration_ticks(self, cmd: Command) -> int:
        """Ticks a command occupies when accepted from idle."""
        kind = cmd.kind
        gait = self.config.gait
        if kind in STEP_DIRECTIONS:
            return gait.step_ticks
        if kind in ROTATION_DIRECTIONS:
            return gait.rotation_ticks
        if kind is CommandKind.SWITCH_MODE:
            return gait.mode_switch_ticks
        if kind in (CommandKind.GRIPPER_OPEN, CommandKind.GRIPPER_CLOSE):
            return self.grasp_ticks()
        return 1

    # -- ticking ---------------------------------------------------------------

    def tick(self) -> None:
        """Advance the world by one fixed step."""
        self.tick_count += 1
        mode_before = self.engine.mode
        completed = self.engine.tick()
        if self.engine.mode is not mode_before:
            self.session.mode = self.engine.mode
            self._log("mode_changed", mode=self.engine.mode.value)
        if self.ball_state is BallState.HELD:
            self.ball_position = self.engine.arm_end_effector()
        if completed:
            self._finish_command()
        if self._pending_settle:
            self._settle_ball()
        if not self.session.busy and not self.success:
            self._check_success()

    def _finish_command(self) -> None:
        cmd = self.session.active_command
        payload = {"command": cmd.label()}
        if cmd.kind is CommandKind.GRIPPER_CLOSE:
            self.gripper_closed = True
            self._try_grasp()
        elif cmd.kind is CommandKind.GRIPPER_OPEN:
            self.gripper_closed = False
            self._release()
        elif cmd.kind is CommandKind.ARM_JOG and not self._jog_ok:
            payload["error"] = "out_of_reach"
        self.session.clear()
        self._log("command_done", **payload)

    def _try_grasp(self) -> None:
        if self.ball_state is not BallState.ON_GROUND:
            return
        ee = self.engine.arm_end_effector()
        bx, by, bz = self.ball_position
        dist = math.sqrt(
            (ee[0] - bx) ** 2 + (ee[1] - by) ** 2 + (ee[2] - bz) ** 2
        )
        if dist <= self.config.teleop.grasp_radius:
            self.ball_state = BallState.HELD
            self.ball_position = ee
            self._log("grasp", distance=dist)

    def _release(self) -> None:
        if self.ball_state is not BallState.HELD:
            return
        self._log("release", position=list(self.ball_position))
        self._pending_settle = True

    def _settle_ball(self) -> None:
        """Drop a released ball straight down onto the ground or into the box."""
        self._pending_settle = False
        bx, by, _ = self.ball_position
        box_x, box_y = self.layout.box_position
        if math.hypot(bx - box_x, by - box_y) <= self.config.world.box_aperture:
            self.ball_state = BallState.IN_BOX
            self.ball_position = (box_x, box_y, self.config.world.ball_radius)
            self._log("ball_in_box")
            return
        self.ball_state = BallState.ON_GROUND
        self.ball_position = (bx, by, self.config.world.ball_radius)
        failure = self.check_failure()
        if failure is not None:
            self._apply_failure(failure)

    def check_failure(self) -> Optional[FailureEvent]:
        """Failure predicate: a free ball outside the front limb's reach disk."""
        if self.ball_state is not BallState.ON_GROUND:
            return None
        cx, cy, radius = self.engine.reach_disk()
        bx, by, bz = self.ball_position
        distance = math.hypot(bx - cx, by - cy)
        if distance <= radius:
            return None
        return FailureEvent(
            ball_position=(bx, by, bz),
            reach_center=(cx, cy),
            reach_radius=radius,
            distance=distance,
        )

    def _apply_failure(self, failure: FailureEvent) -> None:
        self.trial_count += 1
        self.ball_position = (
            self.layout.ball_start[0],
            self.layout.ball_start[1],
            self.config.world.ball_radius,
        )
        self.ball_state = BallState.ON_GROUND
        self._log(
            "failure",
            distance=failure.distance,
            reach_radius=failure.reach_radius,
            trial_count=self.trial_count,
        )

    def _check_success(self) -> None:
        if self.ball_state is not BallState.IN_BOX:
            return
        sx, sy = self.layout.robot_start
        dist = math.hypot(self.engine.body_x - sx, self.engine.body_y - sy)
        if dist <= self.config.world.return_tolerance:
            self.success = True
            self._log("success", distance_to_start=dist)

    # -- observation -------------------------------------------------------------

    def _log(self, kind: str, **payload) -> None:
        self.events.append(Event(t=self.clock, kind=kind, payload=payload))

    def body_pose(self) -> BodyPose:
        return BodyPose(
            x=self.engine.body_x,
            y=self.engine.body_y,
            heading=self.engine.heading,
            height=self.engine.body_height,
        )

    def state(self) -> WorldState:
        return WorldState(
            clock=self.clock,
            tick_count=self.tick_count,
            mode=self.engine.mode,
            busy=self.session.busy,
            body=self.body_pose(),
            joints=self.engine.joints,
            ball_position=self.ball_position,
            ball_state=self.ball_state,
            gripper_closed=self.gripper_closed,
            trial_count=self.trial_count,
            success=self.success,
        )

    def snapshot(self, metrics: Optional[dict] = None) -> dict:
        """Broadcast snapshot document (schema version SNAPSHOT_VERSION)."""
        feet = self.engine.foot_positions()
        arm_chain = None
        if self.engine.mode is RobotMode.MANIPULATION:
            sx, sy = self.engine.shoulder_position(0)
            arm_chain = {
                "shoulder": [sx, sy, self.engine.body_height],
                "ee": list(self.engine.arm_end_effector()),
            }
        cx, cy, radius = self.engine.reach_disk()
        return {
            "v": SNAPSHOT_VERSION,
            "clock": self.clock,
            "mode": self.engine.mode.value,
            "busy": self.session.busy,
            "body": {
                "x": self.engine.body_x,
                "y": self.engine.body_y,
                "heading": self.engine.heading,
            },
            "joints": [list(q.as_tuple()) for q in self.engine.joints],
            "ball": {
                "x": self.ball_position[0],
                "y": self.ball_position[1],
                "z": self.ball_position[2],
                "state": self.ball_state.value,
            },
            "box": {
                "x": self.layout.box_position[0],
                "y": self.layout.box_position[1],
            },
            "trial_count": self.trial_count,
            "metrics": metrics or {},
            "feet": [list(p) for p in feet],
            "arm": arm_chain,
            "reach": {"x": cx, "y": cy, "radius": radius},
            "success": self.success,
        }
