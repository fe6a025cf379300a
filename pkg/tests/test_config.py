import json
import math

import pytest

from morphoarms.config import (
    ConfigError,
    config_from_dict,
    config_to_dict,
    default_config,
    default_limbs,
    load_config,
    validate_limb_symmetry,
)
from morphoarms.kinematics import LimbGeometry


class TestDefaults:
    def test_default_config_builds_and_validates(self):
        config = default_config()
        assert len(config.limbs) == 4
        assert config.gait.tick_rate == 50.0
        assert config.gait.step_duration == 4.0
        assert config.gait.rotation_duration == 10.0
        assert config.gait.mode_switch_duration == 15.0
        assert config.teleop.grasp_duration == 5.0
        assert config.teleop.reach_threshold == 0.15
        assert config.teleop.jog_distance == 0.02
        assert config.teleop.grasp_radius == 0.04

    def test_default_limbs_are_quarter_turn_symmetric(self):
        validate_limb_symmetry(default_limbs())

    def test_stance_satisfies_standing_relation(self):
        config = default_config()
        total = (
            config.stance.initial_upper_arm_pitch
            + config.stance.initial_forearm_pitch
        )
        assert abs(total - math.pi / 2) < 1e-12


class TestSymmetry:
    def test_rejects_wrong_count(self):
        with pytest.raises(ConfigError):
            validate_limb_symmetry(default_limbs()[:3])

    def test_rejects_mismatched_lengths(self):
        limbs = list(default_limbs())
        limbs[2] = LimbGeometry(
            0.25, 0.28, limbs[2].shoulder_offset, limbs[2].mount_yaw
        )
        with pytest.raises(ConfigError):
            validate_limb_symmetry(limbs)

    def test_rejects_broken_offset(self):
        limbs = list(default_limbs())
        limbs[1] = LimbGeometry(0.22, 0.28, (0.3, 0.1, 0.0), limbs[1].mount_yaw)
        with pytest.raises(ConfigError):
            validate_limb_symmetry(limbs)

    def test_rejects_broken_mount_yaw(self):
        limbs = list(default_limbs())
        limbs[3] = LimbGeometry(
            0.22, 0.28, limbs[3].shoulder_offset, limbs[3].mount_yaw + 0.1
        )
        with pytest.raises(ConfigError):
            validate_limb_symmetry(limbs)

    def test_accepts_mount_yaw_modulo_tau(self):
        limbs = list(default_limbs())
        limbs[3] = LimbGeometry(
            0.22, 0.28, limbs[3].shoulder_offset, limbs[3].mount_yaw - math.tau
        )
        validate_limb_symmetry(limbs)


class TestJsonIO:
    def test_round_trip(self, tmp_path):
        config = default_config()
        path = tmp_path / "robot.json"
        path.write_text(json.dumps(config_to_dict(config)))
        loaded = load_config(path)
        assert loaded == config

    def test_partial_document_uses_defaults(self):
        config = config_from_dict({"teleop": {"jog_distance": 0.01}})
        assert config.teleop.jog_distance == 0.01
        assert config.gait.step_duration == 4.0

    def test_rejects_invalid_json(self, tmp_path):
        path = tmp_path / "robot.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_rejects_unknown_gait_keys(self):
        with pytest.raises(ConfigError):
            config_from_dict({"gait": {"warp_factor": 9}})

    def test_rejects_negative_lengths(self):
        doc = config_to_dict(default_config())
        doc["limbs"][0]["upper_arm_length"] = -1.0
        with pytest.raises(ConfigError):
            config_from_dict(doc)

    def test_rejects_nonpositive_world_values(self):
        with pytest.raises(ConfigError):
            config_from_dict({"world": {"ball_radius": 0.0}})
