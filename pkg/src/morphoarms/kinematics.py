"""Analytic forward and inverse kinematics for one 3-DoF limb.

Each limb is a shoulder yaw joint followed by a two-link chain (upper arm,
forearm) pitching in the vertical plane.  Angle convention: pitch angles are
measured below the horizontal plane, positive downward, so a standing limb
with ``upper_arm_pitch + forearm_pitch == pi/2`` has its forearm vertical.

All positions are in meters in the body frame (x forward, y left, z up,
origin at the body center).  Functions here are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

Vec3 = Tuple[float, float, float]

# Joint limit box, radians (closed intervals).
SHOULDER_YAW_LIMITS = (-math.pi / 6, math.pi / 6)
UPPER_ARM_LIMITS = (-math.pi / 2, math.pi / 4)
FOREARM_LIMITS = (-math.pi / 2, math.pi / 2)

# Below this horizontal radius the shoulder yaw is undefined; we return 0.
_YAW_SINGULARITY_RADIUS = 1e-12

# Slack for floating-point noise at the reachability boundary.
_REACH_SLACK = 1e-12


class KinematicsError(Exception):
    """Base class for kinematics failures."""


class JointLimitError(KinematicsError):
    """A joint angle falls outside its limit interval."""

    def __init__(self, joint: str, value: float, lo: float, hi: float):
        self.joint = joint
        self.value = value
        self.lo = lo
        self.hi = hi
        super().__init__(
            f"{joint}={value:.6f} rad outside [{lo:.6f}, {hi:.6f}]"
        )


class OutOfReachError(KinematicsError):
    """Target lies outside the reachable annulus of the limb."""

    def __init__(self, distance: float, min_reach: float, max_reach: float):
        self.distance = distance
        self.min_reach = min_reach
        self.max_reach = max_reach
        self.closest_reachable = min(max(distance, min_reach), max_reach)
        super().__init__(
            f"target at {distance:.6f} m from shoulder, reachable annulus "
            f"[{min_reach:.6f}, {max_reach:.6f}] m "
            f"(closest reachable distance {self.closest_reachable:.6f} m)"
        )


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


@dataclass(frozen=True)
class JointAngles:
    """Joint state of one limb: shoulder yaw and the two pitch joints."""

    shoulder_yaw: float
    upper_arm_pitch: float
    forearm_pitch: float

    def as_tuple(self) -> Vec3:
        return (self.shoulder_yaw, self.upper_arm_pitch, self.forearm_pitch)


@dataclass(frozen=True)
class LimbGeometry:
    """Link lengths and mounting of one limb.

    ``shoulder_offset`` is the attachment point in the body frame and
    ``mount_yaw`` the limb's neutral azimuth around the body.
    """

    upper_arm_length: float
    forearm_length: float
    shoulder_offset: Vec3 = (0.0, 0.0, 0.0)
    mount_yaw: float = 0.0

    def __post_init__(self):
        if self.upper_arm_length <= 0.0:
            raise ValueError("upper_arm_length must be > 0")
        if self.forearm_length <= 0.0:
            raise ValueError("forearm_length must be > 0")

    @property
    def max_reach(self) -> float:
        return self.upper_arm_length + self.forearm_length

    @property
    def min_reach(self) -> float:
        return abs(self.upper_arm_length - self.forearm_length)


@dataclass(frozen=True)
class StanceConfig:
    """Standing pitch angles; the pair must sum to pi/2 (forearm vertical)."""

    initial_upper_arm_pitch: float
    initial_forearm_pitch: float

    def __post_init__(self):
        total = self.initial_upper_arm_pitch + self.initial_forearm_pitch
        if abs(total - math.pi / 2) > 1e-9:
            raise ValueError(
                f"stance pitches must sum to pi/2, got {total:.9f}"
            )
        if abs(self.initial_upper_arm_pitch) >= math.pi / 2:
            raise ValueError("cos(initial_upper_arm_pitch) must be positive")


def default_stance() -> StanceConfig:
    """Default standing configuration (10 degrees upper-arm pitch).

    The upper-arm pitch must stay at or below pi/12 so the gait's lifting
    compensation cannot push the upper arm joint past its pi/4 limit at
    mid-stroke; 10 degrees leaves margin.
    """
    t1 = math.pi / 18
    return StanceConfig(t1, math.pi / 2 - t1)


def check_joint_limits(q: JointAngles) -> Optional[JointLimitError]:
    """Return the first limit violation, or None if q is inside the box."""
    checks = (
        ("shoulder_yaw", q.shoulder_yaw, SHOULDER_YAW_LIMITS),
        ("upper_arm_pitch", q.upper_arm_pitch, UPPER_ARM_LIMITS),
        ("forearm_pitch", q.forearm_pitch, FOREARM_LIMITS),
    )
    for name, value, (lo, hi) in checks:
        if value < lo or value > hi:
            return JointLimitError(name, value, lo, hi)
    return None


def within_limits(q: JointAngles) -> bool:
    return check_joint_limits(q) is None


def require_within_limits(q: JointAngles) -> None:
    err = check_joint_limits(q)
    if err is not None:
        raise err


def forward_kinematics(geom: LimbGeometry, q: JointAngles) -> Vec3:
    """End-effector position in the body frame for joint state ``q``.

    Raises JointLimitError if ``q`` is outside the joint limit box.
    """
    require_within_limits(q)
    return _fk_unchecked(geom, q)


def _fk_unchecked(geom: LimbGeometry, q: JointAngles) -> Vec3:
    yaw = geom.mount_yaw + q.shoulder_yaw
    t1 = q.upper_arm_pitch
    t12 = q.upper_arm_pitch + q.forearm_pitch
    radial = geom.upper_arm_length * math.cos(t1) + geom.forearm_length * math.cos(t12)
    drop = geom.upper_arm_length * math.sin(t1) + geom.forearm_length * math.sin(t12)
    ox, oy, oz = geom.shoulder_offset
    return (
        ox + math.cos(yaw) * radial,
        oy + math.sin(yaw) * radial,
        oz - drop,
    )


def forward_chain(geom: LimbGeometry, q: JointAngles) -> Tuple[Vec3, Vec3, Vec3]:
    """Shoulder, elbow and end-effector positions in the body frame."""
    require_within_limits(q)
    yaw = geom.mount_yaw + q.shoulder_yaw
    cy, sy = math.cos(yaw), math.sin(yaw)
    t1 = q.upper_arm_pitch
    ox, oy, oz = geom.shoulder_offset
    er = geom.upper_arm_length * math.cos(t1)
    elbow = (ox + cy * er, oy + sy * er, oz - geom.upper_arm_length * math.sin(t1))
    return (geom.shoulder_offset, elbow, _fk_unchecked(geom, q))


def check_stance_constraint(q: JointAngles, tol: float) -> bool:
    """True iff the two pitch joints sum to pi/2 within ``tol`` radians."""
    return abs(q.upper_arm_pitch + q.forearm_pitch - math.pi / 2) <= tol


def _planar_candidates(
    geom: LimbGeometry, r: float, w: float
) -> Tuple[Tuple[float, float], ...]:
    """Both elbow solutions (t1, t2) for radial/vertical target (r, w).

    ``w`` is measured downward from the shoulder.  Raises OutOfReachError
    when (r, w) is outside the annulus.
    """
    a = geom.upper_arm_length
    b = geom.forearm_length
    d_sq = r * r + w * w
    d = math.sqrt(d_sq)
    if d > geom.max_reach + _REACH_SLACK or d < geom.min_reach - _REACH_SLACK:
        raise OutOfReachError(d, geom.min_reach, geom.max_reach)
    cos_t2 = (d_sq - a * a - b * b) / (2.0 * a * b)
    cos_t2 = min(1.0, max(-1.0, cos_t2))
    elbow = math.acos(cos_t2)
    gamma = math.atan2(w, r)
    out = []
    for t2 in (elbow, -elbow):
        t1 = gamma - math.atan2(b * math.sin(t2), a + b * math.cos(t2))
        out.append((t1, t2))
    if out[0] == out[1]:
        return (out[0],)
    return tuple(out)


def inverse_kinematics(
    geom: LimbGeometry,
    target: Vec3,
    stance: Optional[StanceConfig] = None,
) -> JointAngles:
    """Analytic inverse kinematics for a body-frame target position.

    Elbow branch selection prefers solutions with the forearm pointing at or
    below the horizontal (pitch sum >= 0, knee toward the ground); when both
    branches qualify the one closer to the stance configuration wins.  A
    target directly under the shoulder returns shoulder_yaw = 0.
    """
    if stance is None:
        stance = default_stance()
    ox, oy, oz = geom.shoulder_offset
    vx, vy, vz = target[0] - ox, target[1] - oy, target[2] - oz
    r = math.hypot(vx, vy)
    w = -vz
    if r < _YAW_SINGULARITY_RADIUS:
        hypotheses = [(0.0, r)]
    else:
        azimuth = math.atan2(vy, vx)
        # A limb can also reach a point with its radial extension negative
        # (foot pulled past the shoulder axis), which flips the yaw by pi.
        hypotheses = [
            (wrap_angle(azimuth - geom.mount_yaw), r),
            (wrap_angle(azimuth + math.pi - geom.mount_yaw), -r),
        ]
    candidates = []
    for yaw, signed_r in hypotheses:
        for t1, t2 in _planar_candidates(geom, signed_r, w):
            candidates.append(JointAngles(yaw, t1, t2))

    in_limits = [q for q in candidates if within_limits(q)]
    if not in_limits:
        raise check_joint_limits(candidates[0])

    knee_down = [q for q in in_limits if q.upper_arm_pitch + q.forearm_pitch >= 0.0]
    pool = knee_down if knee_down else in_limits
    best = min(pool, key=lambda q: _stance_distance(q, stance))

    fx, fy, fz = _fk_unchecked(geom, best)
    err = math.sqrt(
        (fx - target[0]) ** 2 + (fy - target[1]) ** 2 + (fz - target[2]) ** 2
    )
    if err > 1e-9:
        raise KinematicsError(f"ik solution off target by {err:.3e} m")
    return best


def _stance_distance(q: JointAngles, stance: StanceConfig) -> float:
    d1 = q.upper_arm_pitch - stance.initial_upper_arm_pitch
    d2 = q.forearm_pitch - stance.initial_forearm_pitch
    return d1 * d1 + d2 * d2


def alternate_elbow_solution(
    geom: LimbGeometry, q: JointAngles
) -> Optional[JointAngles]:
    """The other elbow branch reaching the same end-effector point.

    Returns None when the configuration is at the straight-limb singularity
    (both branches coincide).
    """
    a = geom.upper_arm_length
    b = geom.forearm_length
    t2 = q.forearm_pitch
    phi = math.atan2(b * math.sin(t2), a + b * math.cos(t2))
    if t2 == 0.0:
        return None
    return JointAngles(q.shoulder_yaw, q.upper_arm_pitch + 2.0 * phi, -t2)
