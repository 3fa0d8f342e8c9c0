import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.transform import Rotation

from haptickit import rotations

angles = st.floats(-2 * math.pi, 2 * math.pi)


@given(angles, angles, angles)
def test_quaternion_product_matches_matrix_product(a, b, c):
    q = rotations.quat_mul(
        rotations.quat_mul(rotations.quat_about_axis(0, a), rotations.quat_about_axis(1, b)),
        rotations.quat_about_axis(2, c),
    )
    R = rotations.rot_x(a) @ rotations.rot_y(b) @ Rotation.from_euler("z", c).as_matrix()
    np.testing.assert_allclose(rotations.quat_to_matrix(q), R, atol=1e-12)


@given(angles, angles)
def test_matrix_matches_scipy(a, b):
    R = rotations.rot_x(a) @ rotations.rot_y(b)
    np.testing.assert_allclose(R, Rotation.from_euler("XY", [a, b]).as_matrix(), atol=1e-12)


def test_canonical_sign():
    q = rotations.canonical([-0.5, 0.5, 0.5, 0.5])
    assert q[0] > 0
    q = rotations.canonical([0.0, -1.0, 0.0, 0.0])
    np.testing.assert_array_equal(q, [0.0, 1.0, 0.0, 0.0])


def test_quat_distance_ignores_double_cover():
    q = np.roll(Rotation.from_rotvec(0.7 * np.array([1, 2, 3]) / math.sqrt(14)).as_quat(), 1)
    assert rotations.quat_distance(q, -q) == 0.0
    assert rotations.quat_distance(q, rotations.IDENTITY) > 0.1


quats = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 1e-3)


@given(quats)
def test_canonical_is_idempotent_bit_for_bit(v):
    q = rotations.canonical(v)
    np.testing.assert_array_equal(rotations.canonical(q), q)
    np.testing.assert_array_equal(rotations.normalize(q), q)


def test_normalize_rejects_zero():
    with pytest.raises(ValueError):
        rotations.normalize([0, 0, 0, 0])


@pytest.mark.parametrize(
    "a, expected",
    [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi), (3 * math.pi / 2, -math.pi / 2)],
)
def test_wrap_angle(a, expected):
    assert rotations.wrap_angle(a) == pytest.approx(expected, abs=1e-15)


def test_quarter_turn_about_z():
    q = rotations.quat_about_axis(2, math.pi / 2)
    np.testing.assert_allclose(rotations.quat_to_matrix(q) @ [1, 0, 0], [0, 1, 0], atol=1e-15)
