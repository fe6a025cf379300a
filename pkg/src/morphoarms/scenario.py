"""Scenario setup, scripted runs, metric segmentation and script planning.

The default scene places the robot two meters east and one meter north of
the ball, facing it, with the box 0.2 m north of the ball.  A run succeeds
when the ball is in the box and the robot has walked back to within the
return tolerance of its start.

Run metrics are split at the mode-switch events: walk-to-goal ends at the
first completed mode switch, telemanipulation at the first switch back after
the ball is boxed, and walk-to-start at the success event.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .config import RobotConfig, default_config
from .gait import ARM_HOME, rotate_quarter, stride_length
from .kinematics import KinematicsError, _fk_unchecked, inverse_kinematics, wrap_angle
from .teleop import (
    Axis,
    Command,
    CommandKind,
    SubmitResult,
    command_from_json,
    command_to_json,
    jog,
)
from .world import BallState, Event, ScenarioLayout, Simulation, WorldState


class ScenarioError(Exception):
    """Bad scenario file or malformed event log."""


@dataclass(frozen=True)
class Scenario:
    """Scene description; ``robot_heading`` None means face the ball."""

    robot_start: Tuple[float, float] = (0.0, 0.0)
    ball_start: Tuple[float, float] = (-2.0, -1.0)
    box_position: Tuple[float, float] = (-2.0, -0.8)
    robot_heading: Optional[float] = None

    def layout(self) -> ScenarioLayout:
        if self.robot_heading is None:
            heading = math.atan2(
                self.ball_start[1] - self.robot_start[1],
                self.ball_start[0] - self.robot_start[0],
            )
        else:
            heading = wrap_angle(self.robot_heading)
        return ScenarioLayout(
            robot_start=self.robot_start,
            robot_heading=heading,
            ball_start=self.ball_start,
            box_position=self.box_position,
        )

    def to_dict(self) -> dict:
        doc = {
            "robot_start": list(self.robot_start),
            "ball_start": list(self.ball_start),
            "box_position": list(self.box_position),
        }
        if self.robot_heading is not None:
            doc["robot_heading"] = self.robot_heading
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "Scenario":
        try:
            return Scenario(
                robot_start=tuple(float(v) for v in doc["robot_start"]),
                ball_start=tuple(float(v) for v in doc["ball_start"]),
                box_position=tuple(float(v) for v in doc["box_position"]),
                robot_heading=(
                    float(doc["robot_heading"]) if "robot_heading" in doc else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad scenario document: {exc}") from exc


def load_scenario(path: Union[str, Path]) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    return Scenario.from_dict(doc)


def load_script(path: Union[str, Path]) -> List[Command]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {path}: {exc}") from exc
    try:
        entries = doc["commands"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError("script file needs a 'commands' list") from exc
    commands = []
    for entry in entries:
        try:
            commands.append(command_from_json({"type": "command", **entry}))
        except ValueError as exc:
            raise ScenarioError(f"bad script entry {entry}: {exc}") from exc
    return commands


def save_script(commands: Sequence[Command], path: Union[str, Path]) -> None:
    entries = []
    for cmd in commands:
        doc = command_to_json(cmd)
        doc.pop("type")
        entries.append(doc)
    Path(path).write_text(json.dumps({"commands": entries}, indent=2) + "\n")


@dataclass(frozen=True)
class ScenarioMetrics:
    """Timing segments and trial count of one run, in simulated seconds."""

    total_time: float
    walk_to_goal_time: float
    telemanipulation_time: float
    walk_to_start_time: float
    trials: int

    def to_dict(self) -> dict:
        return {
            "total_time": self.total_time,
            "walk_to_goal_time": self.walk_to_goal_time,
            "telemanipulation_time": self.telemanipulation_time,
            "walk_to_start_time": self.walk_to_start_time,
            "trials": self.trials,
        }


@dataclass
class RunResult:
    """Outcome of a scripted run."""

    success: bool
    metrics: ScenarioMetrics
    events: List[Event]
    final_state: WorldState
    rejected_commands: int = 0


def segment_metrics(
    events: Iterable[Union[Event, dict]], tick_rate: Optional[float] = None
) -> ScenarioMetrics:
    """Compute run metrics from an event log.

    Accepts Event objects or parsed JSON-lines dictionaries; raises
    ScenarioError on malformed entries.  When ``tick_rate`` is given, event
    times are snapped back to integer ticks so segment durations come out as
    exact tick counts rather than float differences.
    """
    normalized: List[Tuple[float, str]] = []
    failures = 0
    for entry in events:
        if isinstance(entry, Event):
            t, kind = entry.t, entry.kind
        else:
            try:
                t, kind = float(entry["t"]), str(entry["kind"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ScenarioError(f"malformed event entry {entry!r}") from exc
        normalized.append((t, kind))
        if kind == "failure":
            failures += 1
    if not normalized:
        return ScenarioMetrics(0.0, 0.0, 0.0, 0.0, 1)

    total = normalized[-1][0]
    first_switch = None
    boxed_at = None
    second_switch = None
    success_at = None
    for t, kind in normalized:
        if kind == "mode_changed" and first_switch is None:
            first_switch = t
        elif kind == "ball_in_box" and boxed_at is None:
            boxed_at = t
        elif (
            kind == "mode_changed"
            and boxed_at is not None
            and t >= boxed_at
            and second_switch is None
        ):
            second_switch = t
        elif kind == "success" and success_at is None:
            success_at = t

    if success_at is not None:
        total = success_at

    if tick_rate is not None:

        def span(a: Optional[float], b: Optional[float]) -> float:
            if a is None or b is None:
                return 0.0
            return (round(b * tick_rate) - round(a * tick_rate)) / tick_rate

        return ScenarioMetrics(
            total_time=round(total * tick_rate) / tick_rate,
            walk_to_goal_time=span(0.0, first_switch),
            telemanipulation_time=span(first_switch, second_switch),
            walk_to_start_time=span(second_switch, success_at),
            trials=failures + 1,
        )

    walk_to_goal = first_switch if first_switch is not None else 0.0
    telemanipulation = (
        second_switch - first_switch
        if first_switch is not None and second_switch is not None
        else 0.0
    )
    walk_to_start = (
        success_at - second_switch
        if second_switch is not None and success_at is not None
        else 0.0
    )
    return ScenarioMetrics(
        total_time=total,
        walk_to_goal_time=walk_to_goal,
        telemanipulation_time=telemanipulation,
        walk_to_start_time=walk_to_start,
        trials=failures + 1,
    )


def write_event_log(events: Sequence[Event], path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        for event in events:
            fh.write(json.dumps(event.to_json()) + "\n")


def read_event_log(path: Union[str, Path]) -> List[dict]:
    entries = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                entries.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ScenarioError(
                    f"malformed event log line {line_no}: {exc}"
                ) from exc
    return entries


def run_scripted(
    script: Sequence[Command],
    scenario: Scenario,
    config: Optional[RobotConfig] = None,
    max_ticks: int = 2_000_000,
    trajectory_sink=None,
) -> RunResult:
    """Feed a command script through the simulation, one command at a time.

    Each command is submitted as the previous one completes; the run stops at
    success or when the script is exhausted and the robot is idle.  The
    optional ``trajectory_sink`` receives the simulation after every tick.
    """
    if config is None:
        config = default_config()
    sim = Simulation(config, scenario.layout())
    queue = list(script)
    rejected = 0
    while sim.tick_count < max_ticks:
        if sim.success:
            break
        if not sim.session.busy:
            if not queue:
                break
            result = sim.submit(queue.pop(0))
            if result is not SubmitResult.ACCEPTED:
                rejected += 1
        sim.tick()
        if trajectory_sink is not None:
            trajectory_sink(sim)
        if sim.success:
            break
    metrics = segment_metrics(sim.events, tick_rate=sim.tick_rate)
    return RunResult(
        success=sim.success,
        metrics=metrics,
        events=list(sim.events),
        final_state=sim.state(),
        rejected_commands=rejected,
    )


# -- reference script planning -------------------------------------------------

_STEP_BY_QUARTER = {
    0: Command(CommandKind.STEP_FORWARD),
    1: Command(CommandKind.STEP_LEFT),
    2: Command(CommandKind.STEP_BACKWARD),
    3: Command(CommandKind.STEP_RIGHT),
}

# Pad inside the shoulder yaw limit for planned arm targets, radians.
_YAW_PAD = 0.02


def _step_displacements(sim: Simulation) -> List[Tuple[Command, float, float]]:
    """The four step commands and their world-frame displacements."""
    stride = stride_length(sim.config.gait, sim.config.limbs[0])
    hx, hy = math.cos(sim.engine.heading), math.sin(sim.engine.heading)
    out = []
    for quarter, cmd in _STEP_BY_QUARTER.items():
        ux, uy = rotate_quarter(hx, hy, quarter)
        out.append((cmd, stride * ux, stride * uy))
    return out


def _run_command(sim: Simulation, cmd: Command, recorded: List[Command]) -> None:
    result = sim.submit(cmd)
    if result is not SubmitResult.ACCEPTED:
        raise ScenarioError(f"planner submitted an illegal command: {cmd.label()}")
    recorded.append(cmd)
    while sim.session.busy:
        sim.tick()


def _body_frame_point(
    pose_xy: Tuple[float, float], heading: float,
    world_xy: Tuple[float, float], world_z: float, body_height: float,
) -> Tuple[float, float, float]:
    dx = world_xy[0] - pose_xy[0]
    dy = world_xy[1] - pose_xy[1]
    ch, sh = math.cos(heading), math.sin(heading)
    return (ch * dx + sh * dy, -sh * dx + ch * dy, world_z - body_height)


def _grid_counts(target, origin, jog_distance):
    return tuple(round((target[i] - origin[i]) / jog_distance) for i in range(3))


def staircase_jogs(delta_counts) -> List[Command]:
    """Jog commands tracing the straight line to an integer grid offset.

    Interleaves the axes like a line rasterizer so the arm never detours far
    from the direct path, which keeps intermediate points reachable even
    when an axis-grouped route would leave the reach annulus.
    """
    events = []
    for idx, axis in enumerate((Axis.X, Axis.Y, Axis.Z)):
        count = delta_counts[idx]
        sign = 1 if count > 0 else -1
        for j in range(abs(count)):
            events.append(((j + 0.5) / abs(count), idx, jog(axis, sign)))
    events.sort(key=lambda item: (item[0], item[1]))
    return [cmd for _, _, cmd in events]


def plan_jog_commands(sim: Simulation, world_xy, world_z) -> List[Command]:
    """Jog commands that walk the arm onto the grid point nearest a world
    position, given the robot's current pose."""
    target = _body_frame_point(
        (sim.engine.body_x, sim.engine.body_y),
        sim.engine.heading,
        world_xy,
        world_z,
        sim.engine.body_height,
    )
    counts = _grid_counts(target, sim.engine.arm_target, sim.config.teleop.jog_distance)
    return staircase_jogs(counts)


class _PoseCheck:
    """Feasibility oracle for a candidate standing pose.

    Rebuilds the exact jog sequence the plan would execute from that pose
    and runs inverse kinematics on every intermediate grid point.
    """

    def __init__(self, sim: Simulation, ball, box):
        self.config = sim.config
        self.geom = sim.config.limbs[0]
        self.stance = sim.config.stance
        self.body_height = sim.engine.stance_height()
        self.ee_home = _fk_unchecked(self.geom, ARM_HOME)
        self.ball = ball
        self.box = box
        self.ball_z = sim.config.world.ball_radius
        self.carry_z = self.ball_z + 0.03

    def _reachable(self, target) -> bool:
        try:
            q = inverse_kinematics(self.geom, target, self.stance)
        except KinematicsError:
            return False
        return abs(q.shoulder_yaw) <= math.pi / 6 - _YAW_PAD

    def _path_points(self, origin, counts):
        jog_dist = self.config.teleop.jog_distance
        point = list(origin)
        points = []
        axis_index = {Axis.X: 0, Axis.Y: 1, Axis.Z: 2}
        for cmd in staircase_jogs(counts):
            point[axis_index[cmd.axis]] += cmd.sign * jog_dist
            points.append(tuple(point))
        return points

    def feasible(self, pose_xy, heading) -> bool:
        jog_dist = self.config.teleop.jog_distance
        ball_t = _body_frame_point(pose_xy, heading, self.ball, self.ball_z, self.body_height)
        ball_counts = _grid_counts(ball_t, self.ee_home, jog_dist)
        ball_s = tuple(
            self.ee_home[i] + ball_counts[i] * jog_dist for i in range(3)
        )
        if math.dist(ball_s, ball_t) > self.config.teleop.grasp_radius - 1e-6:
            return False
        box_t = _body_frame_point(pose_xy, heading, self.box, self.carry_z, self.body_height)
        box_counts = _grid_counts(box_t, ball_s, jog_dist)
        box_s = tuple(ball_s[i] + box_counts[i] * jog_dist for i in range(3))
        if (
            math.hypot(box_s[0] - box_t[0], box_s[1] - box_t[1])
            > self.config.world.box_aperture - 1e-6
        ):
            return False
        for point in self._path_points(self.ee_home, ball_counts):
            if not self._reachable(point):
                return False
        for point in self._path_points(ball_s, box_counts):
            if not self._reachable(point):
                return False
        return True


def _plan_jogs(sim: Simulation, world_xy, world_z, recorded) -> None:
    for cmd in plan_jog_commands(sim, world_xy, world_z):
        _run_command(sim, cmd, recorded)
        if not sim._jog_ok:
            raise ScenarioError("planned jog was rejected by inverse kinematics")


def plan_reference_script(
    scenario: Scenario, config: Optional[RobotConfig] = None
) -> List[Command]:
    """Construct a command list that completes the scenario in one trial.

    The standing pose for manipulation is chosen by searching rotations and
    walk lattice points for one where the grid-snapped arm targets for both
    ball and box pass inverse kinematics; the plan then turns, walks there,
    boxes the ball with jog/grasp commands and lattice-walks back to the
    start.  Driving an actual simulation keeps the plan exact for the given
    configuration.
    """
    if config is None:
        config = default_config()
    sim = Simulation(config, scenario.layout())
    recorded: List[Command] = []

    ball = scenario.ball_start
    box = scenario.box_position
    mid = ((ball[0] + box[0]) / 2.0, (ball[1] + box[1]) / 2.0)
    check = _PoseCheck(sim, ball, box)
    stride = stride_length(config.gait, config.limbs[0])
    start = scenario.robot_start
    heading0 = sim.engine.heading

    # Preferred standoff: scene midpoint at mount radius plus the middle of
    # the arm's usable ground band in front of the body.
    geom = config.limbs[0]
    mount_radius = math.hypot(geom.shoulder_offset[0], geom.shoulder_offset[1])
    ground_reach = math.sqrt(geom.max_reach**2 - check.body_height**2)
    stand_off = mount_radius + 0.85 * ground_reach

    def basis(heading):
        hx, hy = math.cos(heading), math.sin(heading)
        lx, ly = rotate_quarter(hx, hy, 1)
        return hx, hy, lx, ly

    # Walking happens on a step lattice; combining steps taken before and
    # after the turn gives a much finer reachable set than either lattice
    # alone, so search small post-turn adjustments around the ideal point.
    plan = None
    h0x, h0y, l0x, l0y = basis(heading0)
    for k in (0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5, 6):
        heading = wrap_angle(heading0 + k * (math.pi / 6))
        hx, hy, lx, ly = basis(heading)
        ideal = (mid[0] - stand_off * hx, mid[1] - stand_off * hy)
        ex, ey = ideal[0] - start[0], ideal[1] - start[1]
        c0_base = round((ex * h0x + ey * h0y) / stride)
        d0_base = round((ex * l0x + ey * l0y) / stride)
        for pre in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)):
            c0 = c0_base + pre[0]
            d0 = d0_base + pre[1]
            base = (
                start[0] + stride * (c0 * h0x + d0 * l0x),
                start[1] + stride * (c0 * h0y + d0 * l0y),
            )
            for c1 in (0, 1, -1, 2, -2):
                for d1 in (0, 1, -1, 2, -2):
                    pose = (
                        base[0] + stride * (c1 * hx + d1 * lx),
                        base[1] + stride * (c1 * hy + d1 * ly),
                    )
                    if check.feasible(pose, heading):
                        plan = (k, c0, d0, c1, d1)
                        break
                if plan:
                    break
            if plan:
                break
        if plan:
            break
    if plan is None:
        raise ScenarioError("no feasible manipulation pose found for scenario")

    k, c0, d0, c1, d1 = plan

    def emit_steps(count, forward_cmd, backward_cmd):
        cmd = forward_cmd if count > 0 else backward_cmd
        for _ in range(abs(count)):
            _run_command(sim, cmd, recorded)

    emit_steps(c0, Command(CommandKind.STEP_FORWARD), Command(CommandKind.STEP_BACKWARD))
    emit_steps(d0, Command(CommandKind.STEP_LEFT), Command(CommandKind.STEP_RIGHT))
    turn = Command(CommandKind.ROTATE_LEFT) if k > 0 else Command(CommandKind.ROTATE_RIGHT)
    for _ in range(abs(k)):
        _run_command(sim, turn, recorded)
    emit_steps(c1, Command(CommandKind.STEP_FORWARD), Command(CommandKind.STEP_BACKWARD))
    emit_steps(d1, Command(CommandKind.STEP_LEFT), Command(CommandKind.STEP_RIGHT))

    # Manipulate: raise the arm, pick the ball, drop it over the box.
    _run_command(sim, Command(CommandKind.SWITCH_MODE), recorded)
    _plan_jogs(sim, ball, check.ball_z, recorded)
    _run_command(sim, Command(CommandKind.GRIPPER_CLOSE), recorded)
    if sim.ball_state is not BallState.HELD:
        raise ScenarioError("planner failed to grasp the ball")
    _plan_jogs(sim, box, check.carry_z, recorded)
    _run_command(sim, Command(CommandKind.GRIPPER_OPEN), recorded)
    if sim.ball_state is not BallState.IN_BOX:
        raise ScenarioError("planner failed to drop the ball into the box")
    _run_command(sim, Command(CommandKind.SWITCH_MODE), recorded)

    # Return: lattice-walk home; the run succeeds once inside the tolerance.
    for _ in range(800):
        if sim.success:
            break
        err = math.hypot(start[0] - sim.engine.body_x, start[1] - sim.engine.body_y)
        best = None
        for cmd, dx, dy in _step_displacements(sim):
            nx = sim.engine.body_x + dx
            ny = sim.engine.body_y + dy
            cand = math.hypot(start[0] - nx, start[1] - ny)
            if best is None or cand < best[0]:
                best = (cand, cmd)
        if best[0] >= err:
            break
        _run_command(sim, best[1], recorded)
    if not sim.success:
        raise ScenarioError("planner did not reach the start tolerance")
    return recorded
