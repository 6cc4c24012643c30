"""Circle geometry, fractional-linear maps, and sphere caps."""

import math

import numpy as np
import pytest

from cmod.geometry import (
    Cap,
    Circle,
    cap_from_circle,
    disk_automorphism,
    euclid_from_hyp,
    hyp_from_euclid,
    mobius_apply,
    mobius_circle,
    mobius_compose,
    mobius_through_points,
    stereographic,
    tangency_angle,
)


class TestTangencyAngle:
    def test_equal_radii_give_sixty_degrees(self):
        assert tangency_angle(1.0, 1.0, 1.0) == pytest.approx(math.pi / 3)

    def test_one_one_two(self):
        # law of cosines on the 2-3-3 tangency triangle, angle at a unit circle
        assert tangency_angle(1.0, 1.0, 2.0) == pytest.approx(math.acos(1.0 / 3.0))

    def test_huge_circle_sees_tiny_pair_under_small_angle(self):
        ang = tangency_angle(1e6, 1.0, 1.0)
        assert 0.0 < ang < 1e-3

    def test_tiny_circle_between_huge_neighbors_opens_to_pi(self):
        ang = tangency_angle(1.0, 1e9, 1e9)
        assert ang == pytest.approx(math.pi, abs=1e-3)

    def test_symmetry_in_flanking_radii(self):
        assert tangency_angle(2.0, 3.0, 5.0) == pytest.approx(
            tangency_angle(2.0, 5.0, 3.0))

    def test_angles_of_triangle_sum_to_pi(self):
        r = (0.7, 1.3, 2.9)
        total = (tangency_angle(r[0], r[1], r[2])
                 + tangency_angle(r[1], r[2], r[0])
                 + tangency_angle(r[2], r[0], r[1]))
        assert total == pytest.approx(math.pi)


class TestMobiusMaps:
    def test_apply_affine(self):
        T = np.array([[2.0, 1.0 + 1.0j], [0.0, 1.0]], dtype=complex)
        assert mobius_apply(T, 1.0) == pytest.approx(3.0 + 1.0j)

    def test_apply_inversion(self):
        T = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        assert mobius_apply(T, 2.0) == pytest.approx(0.5)

    def test_compose_matches_sequential_application(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        z = 0.3 - 0.7j
        assert mobius_apply(mobius_compose(A, B), z) == pytest.approx(
            mobius_apply(A, mobius_apply(B, z)))

    def test_through_points_hits_targets(self):
        src = (0.0, 1.0 + 1.0j, -2.0)
        dst = (3.0j, 1.0, 5.0 - 1.0j)
        T = mobius_through_points(src, dst)
        for z, w in zip(src, dst):
            assert mobius_apply(T, z) == pytest.approx(w)

    def test_through_points_rejects_repeated_target(self):
        with pytest.raises(ValueError):
            mobius_through_points((0.0, 1.0, 2.0), (0.0, 0.0, 1.0))


class TestMobiusCircle:
    def test_translation_moves_center(self):
        T = np.array([[1.0, 2.0 + 3.0j], [0.0, 1.0]], dtype=complex)
        out = mobius_circle(T, Circle(1.0 + 0.0j, 0.5))
        assert out.center == pytest.approx(3.0 + 3.0j)
        assert out.radius == pytest.approx(0.5)
        assert not out.complement

    def test_inversion_of_off_center_circle(self):
        # 1/z sends the circle |z-3|=1 to |z-3/8|=1/8
        T = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        out = mobius_circle(T, Circle(3.0 + 0.0j, 1.0))
        assert out.center == pytest.approx(0.375)
        assert out.radius == pytest.approx(0.125)
        assert not out.complement

    def test_pole_inside_flips_to_complement(self):
        # 1/z with the pole interior: image is the outside of a circle
        T = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        out = mobius_circle(T, Circle(0.25 + 0.0j, 1.0))
        assert out.complement

    def test_complement_input_flips_back_to_disk(self):
        T = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        out = mobius_circle(T, Circle(0.25 + 0.0j, 1.0, complement=True))
        assert not out.complement

    def test_circle_through_pole_rejected(self):
        T = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        with pytest.raises(ValueError):
            mobius_circle(T, Circle(1.0 + 0.0j, 1.0))

    def test_near_identity_map_is_stable(self):
        # tiny lower-left entry must not wreck the image center
        eps = 1e-16
        T = np.array([[1.0, eps], [eps, 1.0]], dtype=complex)
        out = mobius_circle(T, Circle(-0.5 + 0.0j, 0.5))
        assert abs(out.center - (-0.5)) < 1e-12
        assert out.radius == pytest.approx(0.5)

    def test_image_contains_image_points(self):
        rng = np.random.default_rng(11)
        T = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        circ = Circle(0.3 - 0.2j, 0.7)
        out = mobius_circle(T, circ)
        for ang in np.linspace(0.0, 2.0 * math.pi, 7, endpoint=False):
            z = circ.center + circ.radius * np.exp(1j * ang)
            w = mobius_apply(T, z)
            assert abs(abs(w - out.center) - out.radius) < 1e-9 * max(1.0, out.radius)


class TestDiskAutomorphism:
    def test_fixes_unit_circle_and_moves_point_to_zero(self):
        zeta = 0.3 + 0.4j
        T = disk_automorphism(zeta)
        assert mobius_apply(T, zeta) == pytest.approx(0.0)
        for ang in (0.0, 1.0, 2.5):
            w = mobius_apply(T, np.exp(1j * ang))
            assert abs(w) == pytest.approx(1.0)

    def test_rejects_point_outside_disk(self):
        with pytest.raises(ValueError):
            disk_automorphism(1.0 + 0.0j)


class TestHyperbolicEuclideanBridge:
    def test_roundtrip(self):
        circ = Circle(0.2 + 0.3j, 0.25)
        z, h = hyp_from_euclid(circ)
        back = euclid_from_hyp(z, h)
        assert back.center == pytest.approx(circ.center)
        assert back.radius == pytest.approx(circ.radius)

    def test_concentric_circle_radius(self):
        # euclidean radius of a hyperbolic circle about 0 is tanh(h/2)
        h = 1.3
        circ = euclid_from_hyp(0.0 + 0.0j, h)
        assert circ.center == pytest.approx(0.0)
        assert circ.radius == pytest.approx(math.tanh(h / 2.0))

    def test_rejects_circle_touching_boundary(self):
        with pytest.raises(ValueError):
            hyp_from_euclid(Circle(0.5 + 0.0j, 0.5))

    def test_rejects_complement_circle(self):
        with pytest.raises(ValueError):
            hyp_from_euclid(Circle(0.0j, 0.5, complement=True))


class TestStereographic:
    def test_zero_goes_to_south_pole(self):
        assert np.allclose(stereographic(0.0), [0.0, 0.0, -1.0])

    def test_infinity_goes_to_north_pole(self):
        assert np.allclose(stereographic(math.inf), [0.0, 0.0, 1.0])

    def test_unit_circle_to_equator(self):
        p = stereographic(1.0 + 0.0j)
        assert p[2] == pytest.approx(0.0)
        assert np.linalg.norm(p) == pytest.approx(1.0)

    def test_points_land_on_sphere(self):
        for z in (0.3 + 0.1j, -2.0 + 5.0j, 100.0j):
            assert np.linalg.norm(stereographic(z)) == pytest.approx(1.0)


class TestCapFromCircle:
    def test_cap_contains_images_of_interior_points(self):
        circ = Circle(1.0 + 1.0j, 0.6)
        cap = cap_from_circle(circ)
        rng = np.random.default_rng(5)
        for _ in range(50):
            ang = rng.uniform(0.0, 2.0 * math.pi)
            rad = circ.radius * math.sqrt(rng.uniform(0.0, 1.0))
            p = stereographic(circ.center + rad * np.exp(1j * ang))
            assert math.acos(np.clip(p @ cap.axis, -1.0, 1.0)) <= cap.theta + 1e-9

    def test_cap_boundary_matches_circle_image(self):
        circ = Circle(-0.4 + 0.2j, 1.1)
        cap = cap_from_circle(circ)
        for ang in np.linspace(0.0, 2.0 * math.pi, 9, endpoint=False):
            p = stereographic(circ.center + circ.radius * np.exp(1j * ang))
            assert math.acos(np.clip(p @ cap.axis, -1.0, 1.0)) == pytest.approx(
                cap.theta, abs=1e-9)

    def test_complement_cap_covers_infinity(self):
        cap = cap_from_circle(Circle(0.0j, 1.0, complement=True))
        north = np.array([0.0, 0.0, 1.0])
        assert math.acos(np.clip(north @ cap.axis, -1.0, 1.0)) <= cap.theta + 1e-9

    def test_unit_disk_cap_is_southern_hemisphere(self):
        cap = cap_from_circle(Circle(0.0j, 1.0))
        assert np.allclose(cap.axis, [0.0, 0.0, -1.0])
        assert cap.theta == pytest.approx(math.pi / 2.0)
