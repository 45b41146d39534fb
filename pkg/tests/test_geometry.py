import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from curved_nbody import geometry as geo
from curved_nbody.errors import DomainError, ProjectionError
from curved_nbody.geometry import Curvature

S2 = math.sqrt(2.0)
kappas = st.sampled_from([0.5, -0.5, 1.0, -1.0, 2.0, -3.0])
angles = st.floats(0, 2 * math.pi)


def planar_in_chart(kappa, frac, theta):
    rmax = 0.95 / math.sqrt(kappa) if kappa > 0 else 2.0
    r = rmax * frac
    return np.array([r * math.cos(theta), r * math.sin(theta)])


class TestCurvature:
    def test_sigma(self):
        assert Curvature(0.0).sigma == 1
        assert Curvature(2.5).sigma == 1
        assert Curvature(-1e-300).sigma == -1

    def test_exact_from_string(self):
        c = Curvature.of("3/4")
        assert c.exact == Fraction(3, 4)
        assert c.kappa == 0.75

    def test_float_has_no_exact(self):
        assert Curvature.of(0.5).exact is None

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            Curvature(float("nan"))

    def test_center(self):
        np.testing.assert_array_equal(Curvature(4.0).center, [0, 0, -0.5])
        np.testing.assert_array_equal(Curvature(-4.0).center, [0, 0, -0.5])


class TestConstraints:
    def test_origin_on_every_surface(self):
        for k in (1.0, -1.0, 0.0):
            assert geo.surface_constraint_residual([0, 0, 0], k) == 0

    def test_equator_point(self):
        assert geo.surface_constraint_residual([1, 0, -1], 1) == 0

    def test_hyperbolic_point(self):
        assert abs(geo.surface_constraint_residual([1, 0, S2 - 1], -1)) < 1e-15

    def test_plane_residual_is_height(self):
        assert geo.surface_constraint_residual([3, 4, 0.25], 0) == 0.25

    def test_velocity_tangent_on_equator(self):
        assert geo.velocity_constraint_residual([1, 0, -1], [0, 1, 0], 1) == 0

    def test_horizontal_velocity_at_origin(self):
        for k in (1.0, -2.0):
            assert geo.velocity_constraint_residual([0, 0, 0], [0.3, -1.2, 0], k) == 0

    def test_velocity_residual_value(self):
        assert geo.velocity_constraint_residual([1, 0, -1], [1, 0, 0], 1) == 1

    @given(kappas, angles, angles)
    def test_rotation_invariant(self, k, theta, rot):
        p = geo.lift(planar_in_chart(k, 0.7, theta), k) + np.array([0, 0, 1e-3])
        c, s = math.cos(rot), math.sin(rot)
        q = np.array([c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]])
        assert geo.surface_constraint_residual(q, k) == pytest.approx(geo.surface_constraint_residual(p, k), abs=1e-14)


class TestChord:
    def test_coincident(self):
        assert geo.chord_distance_sq([1, 0, -1], [1, 0, -1], 1) == 0

    def test_sphere(self):
        assert geo.chord_distance_sq([0, 0, 0], [1, 0, -1], 1) == 2

    def test_hyperbolic(self):
        assert geo.chord_distance_sq([0, 0, 0], [1, 0, S2 - 1], -1) == pytest.approx(2 * S2 - 2, abs=1e-15)

    @given(kappas, st.floats(0, 1), angles, st.floats(0, 1), angles)
    def test_symmetric_and_nonnegative(self, k, f1, t1, f2, t2):
        p = geo.lift(planar_in_chart(k, f1, t1), k)
        q = geo.lift(planar_in_chart(k, f2, t2), k)
        d = geo.chord_distance_sq(p, q, k)
        assert d == geo.chord_distance_sq(q, p, k)
        assert d >= -1e-14

    @given(st.floats(0.05, 1), angles, angles)
    def test_zero_only_when_coincident(self, f, t1, t2):
        p = geo.lift(planar_in_chart(1.0, f, t1), 1.0)
        q = geo.lift(planar_in_chart(1.0, f, t2), 1.0)
        if abs(math.sin((t1 - t2) / 2)) > 1e-3:
            assert geo.chord_distance_sq(p, q, 1.0) > 0


class TestZFromXY:
    def test_origin(self):
        for k in (0.3, -7.0):
            assert geo.z_from_xy([0, 0], k) == 0

    def test_equator_height(self):
        assert geo.z_from_xy([1, 0], 1) == -1

    def test_hyperbolic(self):
        assert geo.z_from_xy([0, 1], -1) == pytest.approx(S2 - 1, abs=1e-15)

    def test_plane(self):
        assert geo.z_from_xy([5, 5], 0) == 0

    def test_outside_sphere_disk(self):
        with pytest.raises(DomainError):
            geo.z_from_xy([1.01, 0], 1)

    @given(kappas, st.floats(0, 1), angles)
    def test_round_trip(self, k, f, t):
        p = geo.lift(planar_in_chart(k, f, t), k)
        assert abs(geo.surface_constraint_residual(p, k)) < 1e-13
        assert geo.z_from_xy(p[:2], k) == pytest.approx(p[2], abs=1e-13)


class TestRhoReduced:
    def test_equal_radii(self):
        p, q = np.array([0.6, 0.0]), np.array([0.0, 0.6])
        assert geo.rho_sq_reduced(p, q, 1.0) == pytest.approx(0.72, abs=1e-15)

    def test_plane(self):
        assert geo.rho_sq_reduced([0, 0], [3, 4], 0) == 25

    def test_domain(self):
        with pytest.raises(DomainError):
            geo.rho_sq_reduced([2, 0], [0, 0], 1)

    def test_random_pairs_match_lift(self, rng):
        for k in (0.5, -0.5):
            for _ in range(200):
                p = planar_in_chart(k, rng.uniform(), rng.uniform(0, 2 * math.pi))
                q = planar_in_chart(k, rng.uniform(), rng.uniform(0, 2 * math.pi))
                want = geo.chord_distance_sq(geo.lift(p, k), geo.lift(q, k), k)
                assert geo.rho_sq_reduced(p, q, k) == pytest.approx(want, abs=1e-12)

    @given(kappas, st.floats(0, 1), angles, st.floats(0, 1), angles)
    def test_matches_lift_property(self, k, f1, t1, f2, t2):
        p, q = planar_in_chart(k, f1, t1), planar_in_chart(k, f2, t2)
        want = geo.chord_distance_sq(geo.lift(p, k), geo.lift(q, k), k)
        assert geo.rho_sq_reduced(p, q, k) == pytest.approx(want, abs=1e-12)


class TestProjection:
    def test_fixed_point(self):
        p, v = np.array([1.0, 0, -1]), np.array([0, 1.0, 0])
        p2, v2 = geo.project_to_surface(p, v, 1)
        np.testing.assert_array_equal(p2, p)
        np.testing.assert_array_equal(v2, v)

    def test_small_offset_equator(self):
        p2, v2 = geo.project_to_surface([1, 0, -1 + 1e-9], [0, 1, 0], 1)
        assert abs(geo.surface_constraint_residual(p2, 1)) < 1e-14
        assert abs(geo.velocity_constraint_residual(p2, v2, 1)) < 1e-14

    def test_small_offset_origin(self):
        p2, v2 = geo.project_to_surface([0, 0, 1e-9], [1, 0, 0], 1)
        assert np.linalg.norm(p2) < 1e-8
        assert abs(geo.surface_constraint_residual(p2, 1)) < 1e-14
        assert abs(geo.velocity_constraint_residual(p2, v2, 1)) < 1e-14
        assert v2[0] == pytest.approx(1.0, abs=1e-12)

    def test_too_far(self):
        with pytest.raises(ProjectionError):
            geo.project_to_surface([0, 0, 0.5], [1, 0, 0], 1)

    def test_threshold_configurable(self):
        geo.project_to_surface([0, 0, 0.5], [1, 0, 0], 1, max_residual=2.0)

    @given(kappas, st.floats(0, 1), angles, st.floats(-1e-6, 1e-6), st.floats(-2, 2), st.floats(-2, 2))
    def test_postconditions(self, k, f, t, dz, vx, vz):
        p = geo.lift(planar_in_chart(k, f, t), k) + np.array([0, 0, dz])
        p2, v2 = geo.project_to_surface(p, [vx, 0.5, vz], k)
        assert abs(geo.surface_constraint_residual(p2, k)) < 1e-14 * max(1.0, abs(k))
        assert abs(geo.velocity_constraint_residual(p2, v2, k)) < 1e-13 * max(1.0, abs(k))
        if k < 0:
            assert p2[2] >= -1e-15

    def test_idempotent(self, rng):
        for k in (0.5, -0.5):
            p = geo.lift(planar_in_chart(k, 0.6, 1.0), k) + [0, 0, 1e-7]
            p1, v1 = geo.project_to_surface(p, [0.3, 0.1, 0.2], k)
            p2, v2 = geo.project_to_surface(p1, v1, k)
            np.testing.assert_allclose(p2, p1, atol=1e-15)
            np.testing.assert_allclose(v2, v1, atol=1e-15)
