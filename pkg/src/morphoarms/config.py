"""Robot configuration: limb geometry, stance, gait, teleop and world knobs.

The geometry config file is a JSON document:

    {
      "limbs": [
        {"upper_arm_length": 0.22, "forearm_length": 0.28,
         "shoulder_offset": [0.25, 0.0, 0.0], "mount_yaw": 0.0},
        ... exactly four entries, one per limb counterclockwise from +x ...
      ],
      "stance": {"theta1_init": 0.1745, "theta2_init": 1.3963},
      "gait":   {"sweep_limit": ..., "step_duration": ..., ...},      (optional)
      "teleop": {"reach_threshold": ..., "jog_distance": ..., ...},    (optional)
      "world":  {"ball_radius": ..., "box_aperture": ..., ...}         (optional)
    }

Units are meters and radians.  The four limbs must be images of each other
under quarter turns about the body center.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .gait import GaitParams, validate_feasibility
from .kinematics import LimbGeometry, StanceConfig, default_stance
from .teleop import TeleopParams

DEFAULT_UPPER_ARM = 0.22
DEFAULT_FOREARM = 0.28
DEFAULT_MOUNT_RADIUS = 0.25

_QUARTER_UNITS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


class ConfigError(Exception):
    """Invalid or inconsistent robot configuration."""


@dataclass(frozen=True)
class WorldParams:
    """Ball, box and scenario tolerances."""

    ball_radius: float = 0.0335
    box_aperture: float = 0.15
    return_tolerance: float = 0.25

    def __post_init__(self):
        for name in ("ball_radius", "box_aperture", "return_tolerance"):
            if getattr(self, name) <= 0.0:
                raise ConfigError(f"{name} must be > 0")


@dataclass(frozen=True)
class RobotConfig:
    limbs: tuple
    stance: StanceConfig
    gait: GaitParams
    teleop: TeleopParams = field(default_factory=TeleopParams)
    world: WorldParams = field(default_factory=WorldParams)

    def __post_init__(self):
        validate_limb_symmetry(self.limbs)
        validate_feasibility(self.gait)


def default_limbs(
    upper_arm: float = DEFAULT_UPPER_ARM,
    forearm: float = DEFAULT_FOREARM,
    mount_radius: float = DEFAULT_MOUNT_RADIUS,
) -> tuple:
    """Four identical limbs mounted at quarter turns around the body."""
    limbs = []
    for i, (ux, uy) in enumerate(_QUARTER_UNITS):
        limbs.append(
            LimbGeometry(
                upper_arm_length=upper_arm,
                forearm_length=forearm,
                shoulder_offset=(mount_radius * ux, mount_radius * uy, 0.0),
                mount_yaw=i * (math.pi / 2),
            )
        )
    return tuple(limbs)


def default_config() -> RobotConfig:
    stance = default_stance()
    return RobotConfig(
        limbs=default_limbs(),
        stance=stance,
        gait=GaitParams(stance=stance),
    )


def validate_limb_symmetry(limbs) -> None:
    """Require four limbs symmetric under 90-degree turns about the center."""
    if len(limbs) != 4:
        raise ConfigError(f"exactly four limbs required, got {len(limbs)}")
    base = limbs[0]
    tol = 1e-9
    for i, limb in enumerate(limbs):
        if (
            abs(limb.upper_arm_length - base.upper_arm_length) > tol
            or abs(limb.forearm_length - base.forearm_length) > tol
        ):
            raise ConfigError("all four limbs must share the same link lengths")
        ox, oy, oz = base.shoulder_offset
        c, s = math.cos(i * math.pi / 2), math.sin(i * math.pi / 2)
        expect = (c * ox - s * oy, s * ox + c * oy, oz)
        got = limb.shoulder_offset
        if any(abs(a - b) > tol for a, b in zip(got, expect)):
            raise ConfigError(
                f"limb {i} shoulder offset {got} breaks quarter-turn symmetry "
                f"(expected {tuple(round(v, 9) for v in expect)})"
            )
        expect_yaw = base.mount_yaw + i * math.pi / 2
        if abs(math.remainder(limb.mount_yaw - expect_yaw, math.tau)) > tol:
            raise ConfigError(
                f"limb {i} mount yaw {limb.mount_yaw:.6f} breaks quarter-turn "
                f"symmetry (expected {expect_yaw:.6f} mod 2pi)"
            )


def _build_stance(doc: dict) -> StanceConfig:
    try:
        return StanceConfig(float(doc["theta1_init"]), float(doc["theta2_init"]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad stance section: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_limb(doc: dict) -> LimbGeometry:
    try:
        offset = doc.get("shoulder_offset", (0.0, 0.0, 0.0))
        return LimbGeometry(
            upper_arm_length=float(doc["upper_arm_length"]),
            forearm_length=float(doc["forearm_length"]),
            shoulder_offset=tuple(float(v) for v in offset),
            mount_yaw=float(doc.get("mount_yaw", 0.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad limb entry: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Union[str, Path]) -> RobotConfig:
    """Load a robot config JSON file, falling back to defaults per section."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(doc)


def config_from_dict(doc: dict) -> RobotConfig:
    stance = _build_stance(doc["stance"]) if "stance" in doc else default_stance()
    if "limbs" in doc:
        limbs = tuple(_build_limb(entry) for entry in doc["limbs"])
    else:
        limbs = default_limbs()
    gait_doc = dict(doc.get("gait", {}))
    try:
        gait = GaitParams(stance=stance, **gait_doc)
    except TypeError as exc:
        raise ConfigError(f"bad gait section: {exc}") from exc
    teleop_doc = dict(doc.get("teleop", {}))
    try:
        teleop = TeleopParams(**teleop_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad teleop section: {exc}") from exc
    world_doc = dict(doc.get("world", {}))
    try:
        world = WorldParams(**world_doc)
    except TypeError as exc:
        raise ConfigError(f"bad world section: {exc}") from exc
    return RobotConfig(limbs=limbs, stance=stance, gait=gait, teleop=teleop, world=world)


def config_to_dict(config: RobotConfig) -> dict:
    return {
        "limbs": [
            {
                "upper_arm_length": limb.upper_arm_length,
                "forearm_length": limb.forearm_length,
                "shoulder_offset": list(limb.shoulder_offset),
                "mount_yaw": limb.mount_yaw,
            }
            for limb in config.limbs
        ],
        "stance": {
            "theta1_init": config.stance.initial_upper_arm_pitch,
            "theta2_init": config.stance.initial_forearm_pitch,
        },
        "gait": {
            "sweep_limit": config.gait.sweep_limit,
            "step_duration": config.gait.step_duration,
            "rotation_duration": config.gait.rotation_duration,
            "mode_switch_duration": config.gait.mode_switch_duration,
            "tick_rate": config.gait.tick_rate,
            "swing_lift": config.gait.swing_lift,
        },
        "teleop": {
            "reach_threshold": config.teleop.reach_threshold,
            "jog_distance": config.teleop.jog_distance,
            "grasp_duration": config.teleop.grasp_duration,
            "grasp_radius": config.teleop.grasp_radius,
        },
        "world": {
            "ball_radius": config.world.ball_radius,
            "box_aperture": config.world.box_aperture,
            "return_tolerance": config.world.return_tolerance,
        },
    }
