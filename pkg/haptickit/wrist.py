# haptickit/wrist.py
"""
Hybrid 2R+1R wrist: a two-dof spherical linkage in series with a roll joint.

The spherical linkage is represented by its serial equivalent, an x-then-y
gimbal, followed by roll about the rotated z axis:

    R(theta) = Rx(theta1) @ Ry(theta2) @ Rz(theta3)

At the home posture the three joint axes are the frame axes, mutually
orthogonal, and the Jacobian is the identity.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import rotations
from .errors import GimbalSingular
from .model import DeviceGeometry, WristJoints, as_vector, theta_of

log = logging.getLogger(__name__)

GIMBAL_TOL = 1e-9        # rad, distance of theta2 from +-90 deg
LIMIT_TOL = 1e-12        # rad, slack on inclusive limit checks
HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class JointViolation:
    joint: int          # 1-based
    excess: float       # rad beyond the limit


@dataclass(frozen=True)
class WristLimitReport:
    feasible: bool
    violations: Tuple[JointViolation, ...]
    margins: Tuple[float, float]     # limit - |theta_k| for joints 1 and 2
    mechanism_singular: bool


def fk_wrist(theta) -> np.ndarray:
    """Orientation quaternion (scalar first, canonical sign) of the wrist."""
    t1, t2, t3 = theta_of(theta)
    q = rotations.quat_mul(
        rotations.quat_mul(rotations.quat_about_axis(0, t1), rotations.quat_about_axis(1, t2)),
        rotations.quat_about_axis(2, t3),
    )
    return rotations.canonical(q)


def ik_wrist(q) -> WristJoints:
    """
    Joint angles reproducing orientation ``q``.

    theta2 is returned in [-pi/2, pi/2], theta1 and theta3 in (-pi, pi].
    Within GIMBAL_TOL of theta2 = +-90 deg only theta1 +- theta3 is defined;
    GimbalSingular carries that combination and a representative solution
    with theta3 = 0.
    """
    R = rotations.quat_to_matrix(as_vector(q, 4))
    cos_t2 = math.hypot(R[1, 2], R[2, 2])
    t2 = math.atan2(R[0, 2], cos_t2)

    if HALF_PI - abs(t2) <= GIMBAL_TOL:
        if t2 > 0.0:
            combined = math.atan2(R[1, 0], R[1, 1])       # theta1 + theta3
        else:
            combined = math.atan2(-R[1, 0], R[1, 1])      # theta1 - theta3
        combined = rotations.wrap_angle(combined)
        rep = WristJoints([combined, math.copysign(HALF_PI, t2), 0.0])
        raise GimbalSingular(
            f"theta2={math.degrees(t2):.9g} deg is within {GIMBAL_TOL:g} rad of +-90 deg; "
            f"only theta1{'+' if t2 > 0 else '-'}theta3={math.degrees(combined):.9g} deg is defined",
            theta2=t2,
            combined=combined,
            joints=rep,
        )

    t1 = math.atan2(-R[1, 2], R[2, 2])
    t3 = math.atan2(-R[0, 1], R[0, 0])
    return WristJoints([_half_open(t1), t2, _half_open(t3)])


def _half_open(a: float) -> float:
    return math.pi if a == -math.pi else a


def wrist_axes(theta) -> np.ndarray:
    """Instantaneous joint axes in the base frame, one per column."""
    t1, t2, _ = theta_of(theta)
    R1 = rotations.rot_x(t1)
    R12 = R1 @ rotations.rot_y(t2)
    return np.column_stack([R1[:, 0], R1[:, 1], R12[:, 2]])


def wrist_jacobian(theta) -> np.ndarray:
    """Maps joint rates to base-frame angular velocity: omega = J @ theta_dot."""
    return wrist_axes(theta)


def wrist_jacobian_det(theta) -> float:
    return math.cos(theta_of(theta)[1])


def angular_velocity(q_dot, q) -> np.ndarray:
    """Base-frame angular velocity from a quaternion and its time derivative."""
    w = 2.0 * rotations.quat_mul(as_vector(q_dot, 4), rotations.quat_conj(as_vector(q, 4)))
    return w[1:]


def check_wrist_limits(theta, geom: DeviceGeometry) -> WristLimitReport:
    """
    Pitch/yaw limits are inclusive; roll is unlimited. Either of the first
    two joints at +-90 deg is a singularity of the real parallel linkage, so
    it is flagged even if the configured limit allows it.
    """
    th = theta_of(theta)
    limit = geom.wrist_pitch_yaw_limit
    violations = []
    margins = []
    for k in (0, 1):
        margin = limit - abs(th[k])
        margins.append(float(margin))
        if margin < -LIMIT_TOL:
            violations.append(JointViolation(joint=k + 1, excess=float(-margin)))
    singular = bool(np.any(np.abs(th[:2]) >= HALF_PI - GIMBAL_TOL))
    if singular:
        log.debug("wrist joints %s sit on a mechanism singularity", th)
    return WristLimitReport(
        feasible=not violations and not singular,
        violations=tuple(violations),
        margins=(margins[0], margins[1]),
        mechanism_singular=singular,
    )
