"""
Quaternion and rotation helpers.

Conventions
-----------
- Quaternions are scalar-first ``(w, x, y, z)``, right-handed, unit norm.
- ``q`` and ``-q`` are the same rotation; ``canonical`` picks the one with a
  nonnegative scalar part (first nonzero component positive when w == 0).
- Matrices act on column vectors; composition ``R1 @ R2`` applies R2 first.
- All angles are in radians.
"""
from __future__ import annotations

import math

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

# Norm deviation left by one division; inside it a quaternion counts as unit.
UNIT_TOL = 4.0 * np.finfo(float).eps


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def quat_about_axis(axis: int, angle: float) -> np.ndarray:
    """Elementary rotation about base axis 0=x, 1=y, 2=z."""
    q = np.zeros(4)
    q[0] = math.cos(angle / 2.0)
    q[1 + axis] = math.sin(angle / 2.0)
    return q


def quat_mul(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def normalize(q) -> np.ndarray:
    """Unit quaternion. Already-unit input comes back bit for bit."""
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("quaternion has zero or non-finite norm")
    if abs(n - 1.0) <= UNIT_TOL:
        return q.copy()
    return q / n


def canonical(q) -> np.ndarray:
    q = normalize(q)
    for c in q:
        if c != 0.0:
            return q if c > 0.0 else -q
    return q


def quat_distance(q1, q2) -> float:
    """Distance between orientations, insensitive to the double cover."""
    a = np.asarray(q1, dtype=float)
    b = np.asarray(q2, dtype=float)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = normalize(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.atan2(math.sin(a), math.cos(a))
    return math.pi if w == -math.pi else w
