# haptickit/orthoglide.py
"""
Kinematics of the orthogonal 3-DOF translational stage.

Leg i is a prismatic joint along e_i followed by a parallelogram of length
L; in the point model it constrains the platform to the sphere
``||p - rho_i e_i|| = L``. Differentiating the three constraints gives
``A p_dot = B rho_dot`` with row i of A equal to ``(p - rho_i e_i)`` and
``B = diag((p - rho_i e_i) . e_i)``, so ``J = A^-1 B``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from .errors import (
    LEG_FAILURES,
    BoundarySingular,
    BranchAmbiguous,
    ConeExceeded,
    NoIntersection,
    OutsideCylinder,
    SingularConfiguration,
    StrokeExceeded,
)
from .model import AXES, DeviceGeometry, TranslationJoints, as_vector, rho_of

log = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12    # relative to L
SINGULAR_TOL = 1e-12    # relative to L, smallest singular value of A
# Roots closer than about 1e-7 L cannot be told apart: h^2 carries rounding
# noise of a few 1e-16 L^2.
H2_NOISE = 1e-14        # relative to L^2
NEWTON_STEPS = 2

# Per-leg status codes returned by solve_legs; nonzero codes index LEG_FAILURES.
LEG_OK = 0
CODE_OF = {cls: i + 1 for i, cls in enumerate(LEG_FAILURES)}
REASON_OF = {code: cls.__name__ for cls, code in CODE_OF.items()}


@dataclass(frozen=True, eq=False)
class TranslationJacobian:
    """Maps prismatic rates to platform velocity: p_dot = matrix @ rho_dot."""
    matrix: np.ndarray
    A: np.ndarray
    B: np.ndarray


class Amplification(NamedTuple):
    sigma: np.ndarray   # descending
    kappa: float


# -------------------------------------------------------------------
# Inverse kinematics
# -------------------------------------------------------------------

def solve_legs(points, geom: DeviceGeometry, check_limits: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorised leg equations for an (n, 3) array of platform positions.

    Returns ``rho`` (n, 3), NaN where a leg fails, and ``codes`` (n, 3) with
    LEG_OK or the code of the failing check. The positive branch
    ``rho_i = p_i + sqrt(L^2 - r_i^2)`` is used throughout.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    L = geom.leg_length
    sq = p * p
    r2 = sq.sum(axis=1, keepdims=True) - sq          # transverse radius^2 per leg
    r = np.sqrt(np.maximum(r2, 0.0))
    codes = np.zeros(p.shape, dtype=np.int8)

    outside = r - L > BOUNDARY_TOL * L
    boundary = ~outside & (L - r <= BOUNDARY_TOL * L)
    codes[outside] = CODE_OF[OutsideCylinder]
    codes[boundary] = CODE_OF[BoundarySingular]

    axial = np.sqrt(np.maximum(L * L - r2, 0.0))
    rho = p + axial
    if check_limits:
        ok = codes == LEG_OK
        stroke_bad = ok & ((rho < geom.stroke_min) | (rho > geom.stroke_max))
        codes[stroke_bad] = CODE_OF[StrokeExceeded]
        cone_bad = ok & ~stroke_bad & (np.arctan2(r, axial) > geom.parallelogram_half_cone)
        codes[cone_bad] = CODE_OF[ConeExceeded]
    rho[codes != LEG_OK] = np.nan
    return rho, codes


def point_reasons(codes: np.ndarray) -> np.ndarray:
    """Collapse per-leg codes to one code per point, by failure precedence."""
    masked = np.where(codes == LEG_OK, np.iinfo(np.int8).max, codes)
    worst = masked.min(axis=1)
    return np.where(worst == np.iinfo(np.int8).max, LEG_OK, worst).astype(np.int8)


def ik_translation(p, geom: DeviceGeometry, check_limits: bool = True) -> TranslationJoints:
    """
    Prismatic joint values placing the platform at ``p``.

    With ``check_limits=False`` only the cylinder and boundary checks apply.
    """
    p = as_vector(p)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"position must be finite, got {p}")
    rho, codes = solve_legs(p[None, :], geom, check_limits=check_limits)
    codes = codes[0]
    for cls in LEG_FAILURES:
        bad = np.flatnonzero(codes == CODE_OF[cls])
        if bad.size:
            legs = tuple(int(i) + 1 for i in bad)
            raise cls(_leg_message(cls, p, legs, geom), legs=legs)
    return TranslationJoints(rho[0])


def _leg_message(cls, p: np.ndarray, legs, geom: DeviceGeometry) -> str:
    where = f"p=({p[0]:.9g}, {p[1]:.9g}, {p[2]:.9g})"
    legs_txt = ", ".join(str(i) for i in legs)
    if cls is OutsideCylinder:
        return f"{where} lies outside the reach cylinder of leg(s) {legs_txt} (L={geom.leg_length:.9g})"
    if cls is BoundarySingular:
        return f"{where} lies on the reach boundary of leg(s) {legs_txt}"
    if cls is StrokeExceeded:
        return f"{where} needs a stroke outside [{geom.stroke_min:.9g}, {geom.stroke_max:.9g}] on leg(s) {legs_txt}"
    return f"{where} tilts the parallelogram of leg(s) {legs_txt} past the half-cone limit"


# -------------------------------------------------------------------
# Forward kinematics
# -------------------------------------------------------------------

def fk_translation(rho, geom: DeviceGeometry) -> np.ndarray:
    """
    Intersection of the three spheres of radius L centred at rho_i e_i.

    The two roots mirror each other across the plane of the centres. The
    one returned has det A < 0, the assembly mode of the isotropic posture
    (where A = -diag(rho)).
    """
    rho = rho_of(rho)
    L = geom.leg_length
    c = AXES * rho[:, None]                          # sphere centres, one per row
    a = c[1] - c[0]
    b = c[2] - c[0]
    n = np.cross(a, b)
    nn = float(n @ n)
    if nn <= (BOUNDARY_TOL * L * L) ** 2:
        raise BranchAmbiguous(f"sphere centres for rho={rho} are collinear; position is not determined")

    # Equal radii: both roots project onto the circumcentre of the centres.
    o = c[0] + np.cross(a @ a * b - b @ b * a, n) / (2.0 * nn)
    d = o - c[0]
    h2 = L * L - float(d @ d)
    if h2 < -H2_NOISE * L * L:
        raise NoIntersection(f"spheres of radius {L:.9g} around rho={rho} do not meet")
    if h2 <= H2_NOISE * L * L:
        raise BranchAmbiguous(f"both assembly roots for rho={rho} coincide (parallel singularity)")
    h = np.sqrt(h2)

    p = o - h * n / np.sqrt(nn)
    for _ in range(NEWTON_STEPS):
        A = p[None, :] - c
        F = np.einsum("ij,ij->i", A, A) - L * L
        try:
            p = p - np.linalg.solve(2.0 * A, F)
        except np.linalg.LinAlgError:
            break

    if np.any(p > rho + BOUNDARY_TOL * L):
        raise NoIntersection(f"no root on the assembly branch for rho={rho}")
    return p


# -------------------------------------------------------------------
# Jacobian and conditioning
# -------------------------------------------------------------------

def _leg_matrices(p: np.ndarray, rho: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Batched A (n,3,3) and diag entries of B (n,3)."""
    A = p[:, None, :] - rho[:, :, None] * AXES[None, :, :]
    b = np.einsum("nii->ni", A)
    return A, b


def jacobian_translation(p, geom: DeviceGeometry) -> TranslationJacobian:
    p = as_vector(p)
    rho = ik_translation(p, geom, check_limits=False).rho
    A, b = _leg_matrices(p[None, :], rho[None, :])
    A, b = A[0], b[0]
    if np.linalg.svd(A, compute_uv=False)[-1] <= SINGULAR_TOL * geom.leg_length:
        raise SingularConfiguration(f"leg matrix is rank-deficient at p={p}")
    B = np.diag(b)
    return TranslationJacobian(matrix=np.linalg.solve(A, B), A=A, B=B)


def velocity_amplification(p, geom: DeviceGeometry) -> Amplification:
    J = jacobian_translation(p, geom).matrix
    sigma = np.linalg.svd(J, compute_uv=False)
    return Amplification(sigma=sigma, kappa=float(sigma[0] / sigma[-1]))


def conditioning(points, rho, geom: DeviceGeometry) -> Tuple[np.ndarray, np.ndarray]:
    """
    Batched singular values of J for consistent (points, rho) pairs.

    Returns ``sigma`` (n, 3) descending, NaN where A is singular, and the
    boolean ``singular`` mask.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    rho = np.atleast_2d(np.asarray(rho, dtype=float))
    sigma = np.full(p.shape, np.nan)
    if p.shape[0] == 0:
        return sigma, np.zeros(0, dtype=bool)
    A, b = _leg_matrices(p, rho)
    singular = np.linalg.svd(A, compute_uv=False)[:, -1] <= SINGULAR_TOL * geom.leg_length
    good = ~singular
    if np.any(good):
        B = b[good][:, :, None] * np.eye(3)[None, :, :]
        J = np.linalg.solve(A[good], B)
        sigma[good] = np.linalg.svd(J, compute_uv=False)
    return sigma, singular


def assembly_det(p, geom: DeviceGeometry) -> float:
    """det(A) / L^3 at ``p``; negative in the assembly mode of the isotropic posture."""
    p = as_vector(p)
    rho = ik_translation(p, geom, check_limits=False).rho
    A, _ = _leg_matrices(p[None, :], rho[None, :])
    return float(np.linalg.det(A[0]) / geom.leg_length ** 3)


def is_regular(p, geom: DeviceGeometry) -> bool:
    try:
        return assembly_det(p, geom) < 0.0
    except (OutsideCylinder, BoundarySingular):
        return False


def constraint_residual(p, rho, geom: DeviceGeometry) -> np.ndarray:
    p = as_vector(p)
    rho = rho_of(rho)
    return np.linalg.norm(p[None, :] - AXES * rho[:, None], axis=1) - geom.leg_length
