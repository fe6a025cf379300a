"""Teleoperation command vocabulary and gesture mapping.

A tracked hand (or pointer standing in for it) acts as a virtual joystick:
displacement from the calibrated home position selects a command once it
leaves a spherical dead zone, with the zone chosen by the dominant
displacement axis.  The right hand drives motion (steps in locomotion mode,
arm jogs in manipulation mode); the left hand handles rotation, rotation
cancel, gripper and mode switching.

The session accepts one command at a time: submissions while a command is
executing are rejected rather than queued.  The single exception is
CANCEL_ROTATION, which is accepted while a rotation runs so it can abort it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple

from .gait import Direction, RobotMode, RotationDirection


class Axis(Enum):
    X = "x"
    Y = "y"
    Z = "z"


class Hand(Enum):
    LEFT = "left"
    RIGHT = "right"


class CommandKind(Enum):
    STEP_FORWARD = "step_forward"
    STEP_BACKWARD = "step_backward"
    STEP_LEFT = "step_left"
    STEP_RIGHT = "step_right"
    ROTATE_LEFT = "rotate_left"
    ROTATE_RIGHT = "rotate_right"
    CANCEL_ROTATION = "cancel_rotation"
    SWITCH_MODE = "switch_mode"
    ARM_JOG = "arm_jog"
    GRIPPER_OPEN = "gripper_open"
    GRIPPER_CLOSE = "gripper_close"


@dataclass(frozen=True)
class Command:
    """One teleoperation command; arm jogs carry an axis and a sign."""

    kind: CommandKind
    axis: Optional[Axis] = None
    sign: int = 0

    def __post_init__(self):
        if self.kind is CommandKind.ARM_JOG:
            if self.axis is None or self.sign not in (-1, 1):
                raise ValueError("arm_jog requires an axis and sign of +-1")
        else:
            if self.axis is not None or self.sign != 0:
                raise ValueError(f"{self.kind.value} takes no axis or sign")

    def label(self) -> str:
        if self.kind is CommandKind.ARM_JOG:
            sign = "+" if self.sign > 0 else "-"
            return f"arm_jog_{self.axis.value}{sign}"
        return self.kind.value


def jog(axis: Axis, sign: int) -> Command:
    return Command(CommandKind.ARM_JOG, axis, sign)


LOCOMOTION_COMMANDS: FrozenSet[CommandKind] = frozenset(
    {
        CommandKind.STEP_FORWARD,
        CommandKind.STEP_BACKWARD,
        CommandKind.STEP_LEFT,
        CommandKind.STEP_RIGHT,
        CommandKind.ROTATE_LEFT,
        CommandKind.ROTATE_RIGHT,
        CommandKind.CANCEL_ROTATION,
        CommandKind.SWITCH_MODE,
    }
)

MANIPULATION_COMMANDS: FrozenSet[CommandKind] = frozenset(
    {
        CommandKind.ARM_JOG,
        CommandKind.GRIPPER_OPEN,
        CommandKind.GRIPPER_CLOSE,
        CommandKind.SWITCH_MODE,
    }
)

STEP_DIRECTIONS: Dict[CommandKind, Direction] = {
    CommandKind.STEP_FORWARD: Direction.FORWARD,
    CommandKind.STEP_BACKWARD: Direction.BACKWARD,
    CommandKind.STEP_LEFT: Direction.LEFT,
    CommandKind.STEP_RIGHT: Direction.RIGHT,
}

ROTATION_DIRECTIONS: Dict[CommandKind, RotationDirection] = {
    CommandKind.ROTATE_LEFT: RotationDirection.CCW,
    CommandKind.ROTATE_RIGHT: RotationDirection.CW,
}


def legal_in_mode(kind: CommandKind, mode: RobotMode) -> bool:
    if mode is RobotMode.LOCOMOTION:
        return kind in LOCOMOTION_COMMANDS
    return kind in MANIPULATION_COMMANDS


@dataclass(frozen=True)
class HandSample:
    """Hand displacement from the calibrated home position, in meters."""

    hand: Hand
    position: Tuple[float, float, float]
    timestamp: float = 0.0


@dataclass(frozen=True)
class TeleopParams:
    """Gesture and manipulation tunables."""

    reach_threshold: float = 0.15
    jog_distance: float = 0.02
    grasp_duration: float = 5.0
    grasp_radius: float = 0.04

    def __post_init__(self):
        if self.reach_threshold <= 0.0:
            raise ValueError("reach_threshold must be > 0")
        if self.jog_distance <= 0.0:
            raise ValueError("jog_distance must be > 0")
        if self.grasp_duration <= 0.0:
            raise ValueError("grasp_duration must be > 0")
        if self.grasp_radius <= 0.0:
            raise ValueError("grasp_radius must be > 0")


# Zone tables: (hand, mode, axis, sign) -> command.  Displacements are in the
# robot body frame (x forward, y left, z up) with no operator mirroring; a
# face-to-face display flip belongs to the UI.
_ZONE_BINDINGS: Dict[Tuple[Hand, RobotMode, Axis, int], Command] = {
    (Hand.RIGHT, RobotMode.LOCOMOTION, Axis.X, 1): Command(CommandKind.STEP_FORWARD),
    (Hand.RIGHT, RobotMode.LOCOMOTION, Axis.X, -1): Command(CommandKind.STEP_BACKWARD),
    (Hand.RIGHT, RobotMode.LOCOMOTION, Axis.Y, 1): Command(CommandKind.STEP_LEFT),
    (Hand.RIGHT, RobotMode.LOCOMOTION, Axis.Y, -1): Command(CommandKind.STEP_RIGHT),
    (Hand.LEFT, RobotMode.LOCOMOTION, Axis.X, 1): Command(CommandKind.ROTATE_RIGHT),
    (Hand.LEFT, RobotMode.LOCOMOTION, Axis.X, -1): Command(CommandKind.ROTATE_LEFT),
    (Hand.LEFT, RobotMode.LOCOMOTION, Axis.Z, 1): Command(CommandKind.SWITCH_MODE),
    (Hand.LEFT, RobotMode.LOCOMOTION, Axis.Z, -1): Command(CommandKind.CANCEL_ROTATION),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.X, 1): jog(Axis.X, 1),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.X, -1): jog(Axis.X, -1),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.Y, 1): jog(Axis.Y, 1),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.Y, -1): jog(Axis.Y, -1),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.Z, 1): jog(Axis.Z, 1),
    (Hand.RIGHT, RobotMode.MANIPULATION, Axis.Z, -1): jog(Axis.Z, -1),
    (Hand.LEFT, RobotMode.MANIPULATION, Axis.X, 1): Command(CommandKind.GRIPPER_OPEN),
    (Hand.LEFT, RobotMode.MANIPULATION, Axis.X, -1): Command(CommandKind.GRIPPER_CLOSE),
    (Hand.LEFT, RobotMode.MANIPULATION, Axis.Z, 1): Command(CommandKind.SWITCH_MODE),
}


def map_gesture(
    sample: HandSample, mode: RobotMode, params: TeleopParams
) -> Optional[Command]:
    """Resolve a hand displacement to a command, or None inside the dead zone.

    The dead zone is spherical with radius ``params.reach_threshold``; beyond
    it the dominant displacement axis picks the zone, ties resolving to the
    earlier axis in (x, y, z) order.  Unbound zones map to None.
    """
    x, y, z = sample.position
    if not all(math.isfinite(v) for v in (x, y, z)):
        raise ValueError("hand sample position must be finite")
    if math.sqrt(x * x + y * y + z * z) < params.reach_threshold:
        return None
    components = ((Axis.X, x), (Axis.Y, y), (Axis.Z, z))
    axis, value = max(components, key=lambda item: abs(item[1]))
    # max() keeps the earlier entry on exact ties, which is the tie rule.
    sign = 1 if value >= 0.0 else -1
    return _ZONE_BINDINGS.get((sample.hand, mode, axis, sign))


class SubmitResult(Enum):
    ACCEPTED = "accepted"
    REJECTED_BUSY = "rejected_busy"
    REJECTED_WRONG_MODE = "rejected_wrong_mode"


@dataclass
class SessionState:
    """One-command-at-a-time session bookkeeping (queue policy: reject)."""

    mode: RobotMode = RobotMode.LOCOMOTION
    busy: bool = False
    active_command: Optional[Command] = None

    def activate(self, cmd: Command) -> None:
        self.busy = True
        self.active_command = cmd

    def clear(self) -> None:
        self.busy = False
        self.active_command = None


def evaluate_submission(cmd: Command, session: SessionState) -> SubmitResult:
    """Pure admission decision for a command against the session state.

    Busy sessions reject everything except CANCEL_ROTATION aimed at a
    rotation in progress; rejection never mutates state.
    """
    if session.busy:
        is_cancel = cmd.kind is CommandKind.CANCEL_ROTATION
        active = session.active_command
        rotating = active is not None and active.kind in ROTATION_DIRECTIONS
        if is_cancel and rotating:
            return SubmitResult.ACCEPTED
        return SubmitResult.REJECTED_BUSY
    if not legal_in_mode(cmd.kind, session.mode):
        return SubmitResult.REJECTED_WRONG_MODE
    return SubmitResult.ACCEPTED


def command_to_json(cmd: Command) -> dict:
    """Wire encoding of a command message."""
    payload = {"type": "command", "name": cmd.kind.value}
    if cmd.kind is CommandKind.ARM_JOG:
        payload["axis"] = cmd.axis.value
        payload["sign"] = cmd.sign
    return payload


def command_from_json(payload: dict) -> Command:
    """Parse a wire command message; raises ValueError on malformed input."""
    if payload.get("type") != "command":
        raise ValueError("not a command message")
    name = payload.get("name")
    try:
        kind = CommandKind(name)
    except ValueError:
        raise ValueError(f"unknown command name: {name!r}") from None
    if kind is CommandKind.ARM_JOG:
        axis = payload.get("axis")
        sign = payload.get("sign")
        try:
            parsed_axis = Axis(axis)
        except ValueError:
            raise ValueError(f"unknown jog axis: {axis!r}") from None
        if sign not in (-1, 1):
            raise ValueError(f"jog sign must be +-1, got {sign!r}")
        return Command(kind, parsed_axis, sign)
    return Command(kind)


def ack_to_json(result: SubmitResult) -> dict:
    return {"type": "ack", "result": result.value}
