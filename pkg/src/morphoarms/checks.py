"""Invariant suite over a robot configuration.

Each check returns (name, passed, detail).  The CLI ``check`` subcommand runs
all of them against the loaded config and reports one line per check; the
test suite runs larger versions of the same properties.
"""

from __future__ import annotations

import math
import random
from typing import List, Optional, Tuple

import numpy as np

from .config import RobotConfig, default_config
from .gait import (
    GaitEngine,
    RobotMode,
    RotationDirection,
    Direction,
    stride_length,
)
from .kinematics import (
    FOREARM_LIMITS,
    JointAngles,
    SHOULDER_YAW_LIMITS,
    StanceConfig,
    UPPER_ARM_LIMITS,
    alternate_elbow_solution,
    forward_kinematics,
    inverse_kinematics,
    within_limits,
)
from .teleop import Command, CommandKind, SubmitResult
from .world import ScenarioLayout, Simulation

CheckResult = Tuple[str, bool, str]


def consistency_grid(n_tilde: int = 1000, n_stance: int = 50) -> float:
    """Worst gap between the two shift formulas over a parameter grid.

    The vertical-plane form (cos(t1) - cos(t1 + xi)) * l and the ground-plane
    form 2*(1 - cos(tt)) * l * cos(t1) are algebraically identical; this
    evaluates both on a grid of sweep offsets and standing angles and returns
    the largest absolute difference, normalized to unit upper-arm length.
    """
    tt = np.linspace(0.0, math.pi / 6, n_tilde)
    t1 = np.linspace(-math.pi / 2 + 1e-6, math.pi / 4, n_stance)
    tt_grid, t1_grid = np.meshgrid(tt, t1)
    xi = np.arccos((2.0 * np.cos(tt_grid) - 1.0) * np.cos(t1_grid)) - t1_grid
    vertical = np.cos(t1_grid) - np.cos(t1_grid + xi)
    ground = 2.0 * (1.0 - np.cos(tt_grid)) * np.cos(t1_grid)
    return float(np.max(np.abs(vertical - ground)))


def random_in_limit_pose(rng: random.Random) -> JointAngles:
    return JointAngles(
        rng.uniform(*SHOULDER_YAW_LIMITS),
        rng.uniform(*UPPER_ARM_LIMITS),
        rng.uniform(*FOREARM_LIMITS),
    )


def canonical_pose(geom, q: JointAngles, stance: StanceConfig) -> JointAngles:
    """Map a pose to the elbow branch the inverse kinematics would return.

    Uses the closed-form alternate branch, so it is independent of the
    Cartesian solve being tested.
    """
    candidates = [q]
    alt = alternate_elbow_solution(geom, q)
    if alt is not None and within_limits(alt):
        candidates.append(alt)
    knee_down = [
        c for c in candidates if c.upper_arm_pitch + c.forearm_pitch >= 0.0
    ]
    pool = knee_down if knee_down else candidates
    return min(
        pool,
        key=lambda c: (
            (c.upper_arm_pitch - stance.initial_upper_arm_pitch) ** 2
            + (c.forearm_pitch - stance.initial_forearm_pitch) ** 2
        ),
    )


def roundtrip_worst_error(
    config: RobotConfig, samples: int, seed: int = 20230517
) -> float:
    """Worst joint-space recovery error of ik(fk(q)) over canonical poses."""
    rng = random.Random(seed)
    geom = config.limbs[0]
    worst = 0.0
    count = 0
    while count < samples:
        q = canonical_pose(geom, random_in_limit_pose(rng), config.stance)
        target = forward_kinematics(geom, q)
        planar = math.hypot(
            target[0] - geom.shoulder_offset[0], target[1] - geom.shoulder_offset[1]
        )
        if planar < 1e-6:
            continue  # yaw convention, not inversion, decides this pose
        recovered = inverse_kinematics(geom, target, config.stance)
        err = max(
            abs(recovered.shoulder_yaw - q.shoulder_yaw),
            abs(recovered.upper_arm_pitch - q.upper_arm_pitch),
            abs(recovered.forearm_pitch - q.forearm_pitch),
        )
        worst = max(worst, err)
        count += 1
    return worst


def _walk(config: RobotConfig, steps: int) -> GaitEngine:
    engine = GaitEngine(config.limbs, config.gait)
    for _ in range(steps):
        engine.begin_step(Direction.FORWARD)
        while engine.busy:
            engine.tick()
    return engine


def stance_sum_worst(config: RobotConfig, steps: int) -> float:
    """Worst grounded-limb pitch-sum error over a straight walk."""
    engine = GaitEngine(config.limbs, config.gait)
    worst = 0.0
    for _ in range(steps):
        engine.begin_step(Direction.FORWARD)
        while engine.busy:
            engine.tick()
            for limb in range(4):
                if engine.grounded[limb]:
                    q = engine.joints[limb]
                    total = q.upper_arm_pitch + q.forearm_pitch
                    worst = max(worst, abs(total - math.pi / 2))
    return worst


def command_program_limits_ok(config: RobotConfig) -> bool:
    """Run one command of each posture-changing kind; limit violations raise."""
    engine = GaitEngine(config.limbs, config.gait)
    for direction in Direction:
        engine.begin_step(direction)
        while engine.busy:
            engine.tick()
    for rotation in RotationDirection:
        engine.begin_rotation(rotation)
        while engine.busy:
            engine.tick()
    engine.begin_mode_switch(RobotMode.MANIPULATION)
    while engine.busy:
        engine.tick()
    engine.begin_jog(0.02, 0.0, 0.0)
    while engine.busy:
        engine.tick()
    engine.begin_mode_switch(RobotMode.LOCOMOTION)
    while engine.busy:
        engine.tick()
    return True


def stride_error(config: RobotConfig) -> float:
    engine = _walk(config, 1)
    expected = stride_length(config.gait, config.limbs[0])
    return abs(engine.body_x - expected)


def rotation_error(config: RobotConfig) -> float:
    engine = GaitEngine(config.limbs, config.gait)
    engine.begin_rotation(RotationDirection.CCW)
    while engine.busy:
        engine.tick()
    return abs(engine.heading - math.pi / 6)


def mid_stroke_slip_error(config: RobotConfig) -> float:
    """Gap between the measured and closed-form mid-stroke radial residual."""
    engine = _walk(config, 1)
    sweep = config.gait.sweep_limit
    t1 = config.stance.initial_upper_arm_pitch
    radius = config.limbs[0].upper_arm_length * math.cos(t1)
    expected = abs((2.0 * math.cos(sweep) - 1.0) - math.cos(sweep)) * radius
    mid = [s for s in engine.slip_log if s.theta0 == 0.0]
    if not mid:
        return float("inf")
    return max(abs(s.radial_residual - expected) for s in mid)


def busy_contract_ok(config: RobotConfig) -> bool:
    layout = ScenarioLayout((0.0, 0.0), 0.0, (1.0, 0.0), (1.0, 0.2))
    sim = Simulation(config, layout)
    assert sim.submit(Command(CommandKind.STEP_FORWARD)) is SubmitResult.ACCEPTED
    for _ in range(config.gait.step_ticks - 1):
        sim.tick()
        if sim.submit(Command(CommandKind.STEP_FORWARD)) is not SubmitResult.REJECTED_BUSY:
            return False
    sim.tick()
    return sim.submit(Command(CommandKind.STEP_FORWARD)) is SubmitResult.ACCEPTED


def run_all(config: Optional[RobotConfig] = None) -> List[CheckResult]:
    """Run the invariant suite; sized for interactive use."""
    if config is None:
        config = default_config()
    results: List[CheckResult] = []

    gap = consistency_grid()
    results.append(
        (
            "shift-formula consistency (1000x50 grid)",
            gap <= 1e-9,
            f"max gap {gap:.3e} (tol 1e-9)",
        )
    )

    worst = stance_sum_worst(config, steps=3)
    results.append(
        (
            "grounded pitch sum == pi/2 over a walk",
            worst <= 1e-12,
            f"worst error {worst:.3e} (tol 1e-12)",
        )
    )

    try:
        command_program_limits_ok(config)
        results.append(("joint limits over all command programs", True, "no violations"))
    except Exception as exc:  # GaitError carries the offending joint
        results.append(("joint limits over all command programs", False, str(exc)))

    err = roundtrip_worst_error(config, samples=500)
    results.append(
        ("fk/ik round trip (500 poses)", err <= 1e-9, f"worst {err:.3e} (tol 1e-9)")
    )

    serr = stride_error(config)
    results.append(
        ("stride equals chord formula", serr <= 1e-9, f"error {serr:.3e} (tol 1e-9)")
    )

    rerr = rotation_error(config)
    results.append(
        ("rotation changes heading by pi/6", rerr == 0.0, f"error {rerr:.3e}")
    )

    slip_err = mid_stroke_slip_error(config)
    results.append(
        (
            "mid-stroke slip residual matches closed form",
            slip_err <= 1e-9,
            f"error {slip_err:.3e} (tol 1e-9)",
        )
    )

    results.append(
        (
            "busy session rejects every submission",
            busy_contract_ok(config),
            "one-command contract",
        )
    )
    return results
