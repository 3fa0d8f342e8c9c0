import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from haptickit.errors import (
    BoundarySingular,
    BranchAmbiguous,
    ConeExceeded,
    NoIntersection,
    OutsideCylinder,
    SingularConfiguration,
    StrokeExceeded,
)
from haptickit.model import DeviceGeometry
from haptickit.orthoglide import (
    assembly_det,
    constraint_residual,
    fk_translation,
    ik_translation,
    is_regular,
    jacobian_translation,
    point_reasons,
    solve_legs,
    velocity_amplification,
)

GEOM = DeviceGeometry.default()
WIDE = DeviceGeometry.unconstrained(1.0)
T_SINGULAR = 1.0 / math.sqrt(6.0)   # parallel singularity on the diagonal, L = 1


def fd_jacobian(rho, geom, h=1e-6):
    cols = []
    for k in range(3):
        d = np.zeros(3)
        d[k] = h
        cols.append((fk_translation(rho + d, geom) - fk_translation(rho - d, geom)) / (2 * h))
    return np.column_stack(cols)


def random_regular_points(rng, n, geom, margin=0.05):
    out = []
    while len(out) < n:
        p = rng.uniform(-0.7, 0.7, 3)
        _, codes = solve_legs(p, geom)
        if codes.any():
            continue
        if assembly_det(p, geom) < -margin:
            out.append(p)
    return np.array(out)


# --- inverse kinematics -------------------------------------------------------

def test_ik_isotropic_posture():
    np.testing.assert_array_equal(ik_translation([0, 0, 0], GEOM).rho, [1.0, 1.0, 1.0])


def test_ik_offset_along_z():
    rho = ik_translation([0, 0, 0.5], WIDE).rho
    np.testing.assert_allclose(rho, [math.sqrt(0.75), math.sqrt(0.75), 1.5], rtol=0, atol=1e-15)
    assert np.abs(constraint_residual([0, 0, 0.5], rho, WIDE)).max() <= 1e-12


def test_outside_cylinder_names_every_leg():
    with pytest.raises(OutsideCylinder) as exc:
        ik_translation([0, 1.1, 0], GEOM)
    assert exc.value.legs == (1, 3)
    assert "OutsideCylinder" in str(exc.value)


def test_boundary_is_singular():
    with pytest.raises(BoundarySingular) as exc:
        ik_translation([0, 1.0, 0], GEOM)
    assert exc.value.legs == (1, 3)


def test_stroke_exceeded():
    geom = DeviceGeometry(1.0, 0.05, 1.2)
    with pytest.raises(StrokeExceeded) as exc:
        ik_translation([0.5, 0, 0], geom)
    assert exc.value.legs == (1,)


def test_cone_exceeded():
    # transverse 0.9 on legs 1 and 3 tilts them by asin(0.9) ~ 64 deg
    with pytest.raises(ConeExceeded) as exc:
        ik_translation([0, 0.9, 0], GEOM)
    assert exc.value.legs == (1, 3)


def test_geometric_failure_takes_precedence_over_limits():
    geom = DeviceGeometry(1.0, 0.05, 1.2)
    with pytest.raises(OutsideCylinder):
        ik_translation([0.5, 1.1, 0], geom)


def test_limits_can_be_skipped():
    geom = DeviceGeometry(1.0, 0.05, 1.2)
    rho = ik_translation([0.5, 0, 0], geom, check_limits=False).rho
    assert rho[0] == pytest.approx(1.5)


def test_non_finite_position_rejected():
    with pytest.raises(ValueError):
        ik_translation([0, math.nan, 0], GEOM)


def test_point_reasons_follow_precedence():
    codes = np.array([[0, 0, 0], [3, 1, 0], [4, 0, 3]], dtype=np.int8)
    np.testing.assert_array_equal(point_reasons(codes), [0, 1, 3])


def test_feasible_set_is_cylinder_intersection():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1.2, 1.2, (20000, 3))
    _, codes = solve_legs(pts, WIDE, check_limits=False)
    sq = pts ** 2
    r = np.sqrt(sq.sum(axis=1, keepdims=True) - sq)
    np.testing.assert_array_equal(np.all(codes == 0, axis=1), np.all(r < 1.0 - 1e-12, axis=1))


# --- forward kinematics -------------------------------------------------------

def test_fk_isotropic_posture():
    np.testing.assert_allclose(fk_translation([1, 1, 1], GEOM), [0, 0, 0], atol=1e-15)


def test_fk_inverts_offset_example():
    p = fk_translation([math.sqrt(0.75), math.sqrt(0.75), 1.5], GEOM)
    np.testing.assert_allclose(p, [0, 0, 0.5], atol=1e-12)


def test_fk_no_intersection():
    with pytest.raises(NoIntersection):
        fk_translation([3, 3, 3], GEOM)


def test_fk_branch_ambiguous_at_parallel_singularity():
    rho = T_SINGULAR + math.sqrt(1 - 2 * T_SINGULAR ** 2)
    with pytest.raises(BranchAmbiguous):
        fk_translation([rho, rho, rho], GEOM)


def test_fk_root_is_in_isotropic_assembly_mode():
    # both (0,0,0) and (2/3)(1,1,1) lie on the three spheres for rho = (1,1,1)
    assert not is_regular(np.full(3, 2 / 3), GEOM)
    assert is_regular(np.zeros(3), GEOM)
    np.testing.assert_allclose(fk_translation([1, 1, 1], GEOM), 0.0, atol=1e-15)


@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))
def test_round_trip_on_regular_poses(x, y, z):
    p = np.array([x, y, z])
    _, codes = solve_legs(p, WIDE)
    assume(not codes.any())
    assume(assembly_det(p, WIDE) < -1e-3)
    rho = ik_translation(p, WIDE)
    assert np.linalg.norm(fk_translation(rho, WIDE) - p) <= 1e-9
    assert np.abs(constraint_residual(p, rho, WIDE)).max() <= 1e-12


def test_fk_output_is_a_position():
    assert fk_translation([1, 1, 1], GEOM).shape == (3,)


# --- Jacobian ----------------------------------------------------------------

def test_jacobian_is_identity_at_isotropy():
    np.testing.assert_array_equal(jacobian_translation([0, 0, 0], GEOM).matrix, np.eye(3))
    amp = velocity_amplification([0, 0, 0], GEOM)
    np.testing.assert_allclose(amp.sigma, [1.0, 1.0, 1.0], rtol=0, atol=1e-15)
    assert amp.kappa == pytest.approx(1.0, abs=1e-15)


def test_jacobian_matches_finite_differences_at_offset():
    J = jacobian_translation([0, 0, 0.5], WIDE).matrix
    J_fd = fd_jacobian(np.array([math.sqrt(0.75), math.sqrt(0.75), 1.5]), WIDE)
    assert np.abs(J - J_fd).max() <= 1e-6 * np.abs(J).max()


def test_jacobian_matches_finite_differences_at_random_poses():
    rng = np.random.default_rng(2024)
    for p in random_regular_points(rng, 1000, WIDE):
        J = jacobian_translation(p, WIDE).matrix
        J_fd = fd_jacobian(ik_translation(p, WIDE).rho, WIDE)
        assert np.linalg.norm(J - J_fd) <= 1e-6 * np.linalg.norm(J)


def test_jacobian_structure():
    p = np.array([0.3, 0.2, 0.1])
    jac = jacobian_translation(p, GEOM)
    rho = ik_translation(p, GEOM).rho
    for i in range(3):
        row = p.copy()
        row[i] -= rho[i]
        np.testing.assert_allclose(jac.A[i], row, atol=1e-15)
        assert jac.B[i, i] == pytest.approx(row[i], abs=1e-15)
    np.testing.assert_allclose(jac.A @ jac.matrix, jac.B, atol=1e-12)


def test_near_boundary_is_nearly_singular():
    sigma = velocity_amplification([0, 1 - 1e-9, 0], GEOM).sigma
    assert sigma[-1] < 1e-4


def test_jacobian_singular_on_parallel_singularity():
    with pytest.raises(SingularConfiguration):
        jacobian_translation(np.full(3, T_SINGULAR), GEOM)


def test_amplification_matches_eigen_oracle():
    p = [0.3, 0.2, 0.1]
    J = jacobian_translation(p, GEOM).matrix
    expected = np.sqrt(np.linalg.eigh(J.T @ J)[0])[::-1]
    amp = velocity_amplification(p, GEOM)
    np.testing.assert_allclose(amp.sigma, expected, atol=1e-10)
    assert amp.kappa >= 1.0


@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_kappa_at_least_one(x, y, z):
    p = [x, y, z]
    _, codes = solve_legs(p, GEOM)
    assume(not codes.any())
    assume(abs(assembly_det(p, GEOM)) > 1e-6)
    assert velocity_amplification(p, GEOM).kappa >= 1.0


# --- residual ----------------------------------------------------------------

def test_residual_examples():
    np.testing.assert_array_equal(constraint_residual([0, 0, 0], [1, 1, 1], GEOM), [0, 0, 0])
    np.testing.assert_array_equal(constraint_residual([0, 0, 0], [2, 1, 1], GEOM), [1, 0, 0])


def test_residual_on_random_ik_pairs():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 0.5, (500, 3))
    rho, codes = solve_legs(pts, WIDE)
    ok = ~codes.any(axis=1)
    for p, r in zip(pts[ok], rho[ok]):
        assert np.abs(constraint_residual(p, r, WIDE)).max() <= 1e-12
