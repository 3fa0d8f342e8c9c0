# haptickit/device.py
"""
The assembled 3T+2R+1R device: the translational stage carries the wrist,
legs 1 and 2 drive wrist joints 1 and 2 through their double Cardan
transmissions, and the roll motor is embedded. Position and orientation
are decoupled, so every 6x6 map here is block diagonal.
"""
from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
from scipy.linalg import block_diag

from .errors import HaptickitError, UnsupportedVariant, WristLimitExceeded
from .model import (
    CardanChainState,
    DeviceGeometry,
    Pose,
    TranslationJoints,
    Variant,
    WristJoints,
    as_vector,
)
from .orthoglide import fk_translation, ik_translation, jacobian_translation
from .transmission import double_cardan_transfer
from .wrist import check_wrist_limits, fk_wrist, ik_wrist, wrist_jacobian

log = logging.getLogger(__name__)

# Leg carrying the transmission of each wrist joint; joint 3 is driven directly.
TRANSMISSION_LEGS = (1, 2)


def _staged(stage: str, err: HaptickitError, **extra) -> HaptickitError:
    err.stage = stage
    for key, value in extra.items():
        setattr(err, key, value)
    return err


def _require_limits(theta: np.ndarray, geom: DeviceGeometry) -> None:
    report = check_wrist_limits(theta, geom)
    if report.feasible:
        return
    parts = [f"joint {v.joint} over by {math.degrees(v.excess):.9g} deg" for v in report.violations]
    if report.mechanism_singular:
        parts.append("joint at +-90 deg (mechanism singularity)")
    raise WristLimitExceeded("; ".join(parts))


def _chains(p: np.ndarray, phi: np.ndarray, geom: DeviceGeometry) -> Tuple[CardanChainState, ...]:
    return tuple(
        double_cardan_transfer(phi[j], p, geom, leg)
        for j, leg in enumerate(TRANSMISSION_LEGS)
    )


def transmission_states(rho, phi_motor, geom: DeviceGeometry) -> Tuple[CardanChainState, ...]:
    return _chains(fk_translation(rho, geom), as_vector(phi_motor), geom)


def fk_device(rho, phi_motor, geom: DeviceGeometry) -> Pose:
    """Pose from prismatic joints and the three wrist motor angles."""
    phi = as_vector(phi_motor)
    try:
        p = fk_translation(rho, geom)
        chains = _chains(p, phi, geom)
    except HaptickitError as e:
        raise _staged("translation", e)
    theta = np.array([chains[0].phi_after_u2, chains[1].phi_after_u2, phi[2]])
    try:
        _require_limits(theta, geom)
    except HaptickitError as e:
        raise _staged("wrist", e)
    return Pose(p, fk_wrist(theta))


def ik_device(pose: Pose, geom: DeviceGeometry) -> Tuple[TranslationJoints, WristJoints]:
    """
    Translation joints from the position alone, wrist joints from the
    orientation alone. Wrist-stage errors carry the solved translation
    joints as ``partial``.
    """
    try:
        rho = ik_translation(pose.position, geom)
    except HaptickitError as e:
        raise _staged("translation", e)
    try:
        theta = ik_wrist(pose.orientation)
        _require_limits(theta.theta, geom)
    except HaptickitError as e:
        raise _staged("wrist", e, partial=rho)
    return rho, theta


def jacobian_device(pose: Pose, geom: DeviceGeometry) -> np.ndarray:
    """6x6 map from (rho_dot, theta_dot) to (p_dot, omega)."""
    try:
        Jt = jacobian_translation(pose.position, geom).matrix
    except HaptickitError as e:
        raise _staged("translation", e)
    try:
        Jw = wrist_jacobian(ik_wrist(pose.orientation))
    except HaptickitError as e:
        raise _staged("wrist", e)
    return block_diag(Jt, Jw)


def actuator_efforts(pose: Pose, wrench, geom: DeviceGeometry) -> np.ndarray:
    """
    Static actuator efforts (prismatic forces N, motor torques N*m) that
    balance a wrench (force N, torque N*m) at the end effector.
    """
    w = as_vector(wrench, 6)
    return jacobian_device(pose, geom).T @ w


def isotropy_posture(geom: DeviceGeometry) -> Tuple[TranslationJoints, WristJoints]:
    if geom.variant is not Variant.THREE_T_TWO_R_ONE_R:
        raise UnsupportedVariant(
            f"variant {geom.variant.value} is isotropic with its wrist axis along x = y = z; "
            "its 3-dof wrist kinematics are not provided"
        )
    L = geom.leg_length
    return TranslationJoints([L, L, L]), WristJoints([0.0, 0.0, 0.0])


def isotropy_axis(geom: DeviceGeometry) -> np.ndarray:
    """Direction of the wrist's last axis at the isotropic configuration."""
    if geom.variant is Variant.THREE_T_THREE_R:
        return np.ones(3) / math.sqrt(3.0)
    return np.array([0.0, 0.0, 1.0])
