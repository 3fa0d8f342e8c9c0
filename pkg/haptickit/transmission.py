# haptickit/transmission.py
"""
Rotary transmission of one leg, from the base motor to the wrist.

The motor shaft runs along the leg axis e_i, through the prismatic joint,
then along the parallelogram's neutral fibre between two universal joints
and out parallel to e_i again. Only the universal joints change the shaft
angle. With both bends equal (the parallelogram keeps the end shafts
parallel) and the yokes phased 90 deg apart, the pair is homokinetic.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from .errors import BendOutOfRange
from .model import CardanChainState, DeviceGeometry, as_vector
from .orthoglide import ik_translation

log = logging.getLogger(__name__)

HOMOKINETIC_TOL = 1e-12
HALF_PI = math.pi / 2.0


def _leg_index(leg: int) -> int:
    if leg not in (1, 2, 3):
        raise ValueError(f"leg must be 1, 2 or 3, got {leg!r}")
    return leg - 1


def _parallelogram_direction(p, geom: DeviceGeometry, leg: int) -> np.ndarray:
    i = _leg_index(leg)
    p = as_vector(p)
    rho = ik_translation(p, geom).rho
    u = -p
    u[i] += rho[i]
    return u / geom.leg_length


def bend_angle(p, geom: DeviceGeometry, leg: int) -> float:
    """Angle between the leg axis e_i and the parallelogram direction."""
    i = _leg_index(leg)
    u = _parallelogram_direction(p, geom, leg)
    transverse = math.hypot(*np.delete(u, i))
    return math.atan2(transverse, u[i])


def bend_plane_azimuth(p, geom: DeviceGeometry, leg: int) -> float:
    """Azimuth of the bend plane about e_i, from the next axis e_(i+1)."""
    i = _leg_index(leg)
    u = _parallelogram_direction(p, geom, leg)
    return math.atan2(u[(i + 2) % 3], u[(i + 1) % 3])


def _check_bend(beta) -> None:
    b = np.asarray(beta, dtype=float)
    if np.any(~np.isfinite(b)) or np.any(b < 0.0) or np.any(b >= HALF_PI):
        raise BendOutOfRange(f"bend angle must lie in [0, 90) deg, got {np.degrees(b)} deg")


def cardan_transfer(phi_in, beta, phase=0.0):
    """
    Output angle of a single universal joint:

        tan(phi_out - phase) = tan(phi_in - phase) / cos(beta)

    unwrapped so phi_out is continuous and increasing in phi_in, equal to
    phi_in at every multiple of 90 deg from ``phase``. Works on arrays.
    """
    _check_bend(beta)
    x = np.asarray(phi_in, dtype=float) - phase
    k = np.round(x / math.pi)
    x0 = x - k * math.pi                             # in [-pi/2, pi/2]
    y0 = np.arctan2(np.sin(x0), np.cos(x0) * np.cos(beta))
    out = phase + k * math.pi + y0
    return float(out) if np.ndim(out) == 0 else out


def cardan_velocity_ratio(phi_in, beta, phase=0.0):
    """
    d(phi_out)/d(phi_in) of a single universal joint: 1/cos(beta) at
    ``phase``, cos(beta) a quarter turn away.
    """
    _check_bend(beta)
    c = np.cos(np.asarray(phi_in, dtype=float) - phase)
    out = np.cos(beta) / (1.0 - np.sin(beta) ** 2 * c * c)
    return float(out) if np.ndim(out) == 0 else out


def double_cardan_transfer(phi_motor: float, p, geom: DeviceGeometry, leg: int,
                           phase: Optional[float] = None) -> CardanChainState:
    """
    Z-configuration: both joints bend by the same beta, the second yoke
    is phased 90 deg from the first, so it undoes the first joint's
    fluctuation. ``phase`` defaults to the bend-plane azimuth of the leg.
    """
    beta = bend_angle(p, geom, leg)
    if phase is None:
        phase = bend_plane_azimuth(p, geom, leg)
    phi_u1 = cardan_transfer(phi_motor, beta, phase)
    phi_u2 = cardan_transfer(phi_u1, beta, phase + HALF_PI)
    error = abs(phi_u2 - phi_motor)
    if error > HOMOKINETIC_TOL * max(1.0, abs(phi_motor)):
        log.warning("double Cardan on leg %d drifts by %.3g rad at phi_motor=%.9g", leg, error, phi_motor)
    log.debug("leg %d: beta=%.9g phase=%.9g u1=%.9g u2=%.9g", leg, beta, phase, phi_u1, phi_u2)
    return CardanChainState(
        bend_angle=beta,
        phase=float(phase),
        phi_motor=float(phi_motor),
        phi_after_u1=float(phi_u1),
        phi_after_u2=float(phi_u2),
    )
