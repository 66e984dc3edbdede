import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import euler_matrix_ref
from spinfield.errors import ChartDomainError
from spinfield.so3 import (KElement, Rotation, SpherePoint, act, character, compose, inverse, k_factor,
                           k_factor_matrix, random_rotations, random_sphere_points, section)

angle = st.floats(0.0, 2 * np.pi, allow_nan=False)
polar = st.floats(0.0, np.pi, allow_nan=False)
rotations = st.builds(Rotation, angle, polar, angle)
points = st.builds(SpherePoint, polar, angle)
unit_vectors = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 0.1)


def rz(a):
    return Rotation(a, 0.0, 0.0)


@given(rotations)
def test_matrix_is_special_orthogonal(r):
    m = r.matrix
    assert np.max(np.abs(m.T @ m - np.eye(3))) < 1e-12
    assert abs(np.linalg.det(m) - 1.0) < 1e-12


@given(rotations)
def test_canonical_ranges(r):
    assert 0.0 <= r.alpha < 2 * np.pi
    assert 0.0 <= r.beta <= np.pi
    assert 0.0 <= r.gamma < 2 * np.pi


@given(rotations, unit_vectors)
def test_euler_round_trip_preserves_action(r, v):
    back = Rotation.from_matrix(r.matrix)
    assert np.allclose(back.matrix @ v, r.matrix @ v, atol=1e-12)


@given(angle, polar, angle)
def test_matrix_matches_axis_product(a, b, g):
    assert np.allclose(Rotation(a, b, g).matrix, euler_matrix_ref(a, b, g), atol=1e-12)


def test_gimbal_lock_folds_into_alpha():
    r = Rotation.from_matrix(euler_matrix_ref(0.4, 0.0, 0.5))
    assert r.beta == 0.0 and r.gamma == 0.0
    assert r.alpha == pytest.approx(0.9)
    south = Rotation.from_matrix(euler_matrix_ref(0.4, np.pi, 0.5))
    assert south.beta == pytest.approx(np.pi) and south.gamma == 0.0
    assert np.allclose(south.matrix, euler_matrix_ref(0.4, np.pi, 0.5), atol=1e-12)


@given(rotations)
def test_compose_with_inverse_is_identity(r):
    assert compose(r, inverse(r)).is_close(Rotation.identity())


@given(angle, angle)
def test_z_rotations_add(a, b):
    assert compose(rz(a), rz(b)).is_close(rz((a + b) % (2 * np.pi)))


def test_compose_matches_matrix_product():
    r1, r2 = Rotation(0.3, 0.7, 0.1), Rotation(1.1, 0.2, 2.0)
    assert np.allclose(compose(r1, r2).matrix, euler_matrix_ref(0.3, 0.7, 0.1) @ euler_matrix_ref(1.1, 0.2, 2.0),
                       atol=1e-12)


@given(rotations, rotations, rotations, unit_vectors)
def test_compose_is_associative(r1, r2, r3, v):
    left = compose(compose(r1, r2), r3)
    right = compose(r1, compose(r2, r3))
    assert np.allclose(left.matrix @ v, right.matrix @ v, atol=1e-10)


def test_section_examples():
    assert section(SpherePoint.north()).is_close(Rotation.identity())
    assert section(SpherePoint(np.pi / 2, 0.0)).is_close(Rotation(0.0, np.pi / 2, 0.0))
    assert section(SpherePoint.south()).is_close(Rotation(0.0, np.pi, 0.0))


def test_section_is_right_inverse(rng):
    for x in random_sphere_points(1000, rng):
        g = section(x)
        assert g.gamma == 0.0
        assert np.allclose(act(g, SpherePoint.north()).vector, x.vector, atol=1e-12)


@given(points)
def test_act_examples(x):
    assert np.allclose(act(Rotation.identity(), x).vector, x.vector, atol=1e-15)


@given(angle, polar, angle)
def test_act_on_north_pole(a, b, phi):
    assert act(rz(phi), SpherePoint.north()).theta < 1e-12
    y = act(Rotation(a, b, 0.0), SpherePoint.north())
    assert np.allclose(y.vector, SpherePoint(b, a).vector, atol=1e-12)


@given(points)
def test_sphere_point_vector_is_unit(x):
    v = x.vector
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    assert np.isclose(np.arccos(np.clip(v[2], -1, 1)), x.theta, atol=1e-7)


def test_sphere_point_rejects_bad_colatitude():
    with pytest.raises(ValueError):
        SpherePoint(4.0, 0.0)


def test_character_examples():
    assert character(0, KElement(1.234)) == 1
    assert character(2, KElement(np.pi)) == pytest.approx(1.0)
    assert character(-1, KElement(np.pi / 2)) == pytest.approx(-1j)


@given(st.integers(-4, 4), angle, angle)
def test_character_is_multiplicative(s, a, b):
    k1, k2 = KElement(a), KElement(b)
    assert character(s, k1) * character(s, k2) == pytest.approx(character(s, k1 @ k2), abs=1e-12)
    assert abs(character(s, k1)) == pytest.approx(1.0)


@given(angle)
def test_k_element_embeds_with_zero_beta(g):
    assert KElement(g).as_rotation().beta == 0.0


def test_k_factor_same_chart_is_identity(rng):
    for r, x in zip(random_rotations(50, rng), random_sphere_points(50, rng)):
        k = k_factor(r, r, x)
        assert min(k.gamma, 2 * np.pi - k.gamma) < 1e-10


def test_k_factor_rotation_about_point():
    x = SpherePoint(1.1, 0.3)
    from spinfield.so3 import axis_angle_matrix
    for gamma in (0.2, 1.5, 3.0, -0.7):
        r2 = Rotation.from_matrix(axis_angle_matrix(x.vector, gamma))
        k = k_factor(r2, Rotation.identity(), x)
        assert np.exp(1j * k.gamma) == pytest.approx(np.exp(-1j * gamma), abs=1e-10)


def test_k_factor_matches_explicit_product(rng):
    rots = random_rotations(200, rng)
    for r1, r2, x in zip(rots[:100], rots[100:], random_sphere_points(100, rng)):
        m = section(act(r2.inverse(), x)).matrix.T @ r2.matrix.T @ r1.matrix @ section(act(r1.inverse(), x)).matrix
        assert abs(m[2, 2] - 1.0) < 1e-10
        assert np.allclose(k_factor(r2, r1, x).as_rotation().matrix, m, atol=1e-10)


def test_k_factor_reduction_identity(rng):
    rots = random_rotations(100, rng)
    for r1, r2, x in zip(rots[:50], rots[50:], random_sphere_points(50, rng)):
        lhs = k_factor(r2, r1, x)
        rhs = k_factor(r1.inverse() @ r2, Rotation.identity(), act(r1.inverse(), x))
        assert np.exp(1j * lhs.gamma) == pytest.approx(np.exp(1j * rhs.gamma), abs=1e-10)


def test_k_factor_raises_near_pole():
    with pytest.raises(ChartDomainError):
        k_factor_matrix(Rotation.identity(), Rotation(0.3, 0.5, 0.0), SpherePoint.north())
