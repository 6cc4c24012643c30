"""Triangulation builders: counts, validity, and seeded randomization."""

import numpy as np
import pytest

from cmod.graphs import orient_faces, rotation_system, validate_triangulation
from cmod.triangulate import (
    collared_wheel,
    hex_disk,
    random_disk_triangulation,
    random_sphere_triangulation,
    sphere_triangulation,
    triangulated_cylinder,
    wheel,
)


def euler_characteristic(g):
    return g.n - g.m + len(g.faces)


class TestWheel:
    def test_counts(self):
        g = wheel(6)
        assert g.n == 7
        assert g.m == 12
        assert len(g.faces) == 6

    def test_valid_disk(self):
        assert validate_triangulation(wheel(5)).valid

    def test_rejects_tiny_hub(self):
        with pytest.raises(ValueError):
            wheel(2)


class TestHexDisk:
    def test_counts_and_coordinates(self):
        g, coords = hex_disk(2)
        assert g.n == 19
        assert coords.shape == (19, 2)
        assert euler_characteristic(g) == 1
        _, isb = rotation_system(g, orient_faces(g))
        assert isb.sum() == 12

    def test_degree_pattern(self):
        g, _ = hex_disk(3)
        deg = np.zeros(g.n, dtype=int)
        for u, v in g.edges:
            deg[u] += 1
            deg[v] += 1
        _, isb = rotation_system(g, orient_faces(g))
        assert np.all(deg[~isb] == 6)
        assert set(np.unique(deg[isb])) <= {3, 4}


class TestSphereTriangulation:
    def test_vertex_counts_by_depth(self):
        for depth, n in ((0, 12), (1, 42), (2, 162)):
            g, _ = sphere_triangulation(depth)
            assert g.n == n

    def test_euler_characteristic_two(self):
        g, _ = sphere_triangulation(1)
        assert euler_characteristic(g) == 2

    def test_closed_no_boundary(self):
        g, _ = sphere_triangulation(1)
        _, isb = rotation_system(g, orient_faces(g))
        assert not np.any(isb)


class TestCylinder:
    def test_counts(self):
        g, left, right = triangulated_cylinder(6, 3)
        assert g.n == 18
        assert len(left) == 6
        assert len(right) == 6
        assert set(left).isdisjoint(right)


class TestRandomSphere:
    def test_deterministic_per_seed(self):
        a = random_sphere_triangulation(2, 60, 11)
        b = random_sphere_triangulation(2, 60, 11)
        assert np.array_equal(a.edges, b.edges)
        assert a.faces == b.faces

    def test_seeds_differ(self):
        a = random_sphere_triangulation(2, 60, 1)
        b = random_sphere_triangulation(2, 60, 2)
        assert not np.array_equal(a.edges, b.edges)

    def test_still_a_closed_triangulation(self):
        g = random_sphere_triangulation(2, 60, 3)
        assert euler_characteristic(g) == 2
        assert validate_triangulation(g).valid
        _, isb = rotation_system(g, orient_faces(g))
        assert not np.any(isb)

    def test_degree_cap_respected(self):
        g = random_sphere_triangulation(2, 200, 5, max_degree=7)
        deg = np.zeros(g.n, dtype=int)
        for u, v in g.edges:
            deg[u] += 1
            deg[v] += 1
        assert deg.max() <= 7
        assert deg.min() >= 3


class TestRandomDisk:
    def test_deterministic_per_seed(self):
        a = random_disk_triangulation(3, 40, 9)
        b = random_disk_triangulation(3, 40, 9)
        assert np.array_equal(a.edges, b.edges)

    def test_valid_disk_with_same_boundary(self):
        base, _ = hex_disk(3)
        _, base_isb = rotation_system(base, orient_faces(base))
        g = random_disk_triangulation(3, 40, 4)
        assert validate_triangulation(g).valid
        assert euler_characteristic(g) == 1
        _, isb = rotation_system(g, orient_faces(g))
        assert np.array_equal(isb, base_isb)

    def test_degree_bounds(self):
        g = random_disk_triangulation(4, 80, 2, max_degree=7)
        deg = np.zeros(g.n, dtype=int)
        for u, v in g.edges:
            deg[u] += 1
            deg[v] += 1
        _, isb = rotation_system(g, orient_faces(g))
        assert deg[~isb].max() <= 7
        assert deg[~isb].min() >= 4
        assert deg[isb].min() >= 3


class TestCollaredWheel:
    def test_hub_degree_preserved(self):
        g, collar = collared_wheel(7, 2)
        deg = np.zeros(g.n, dtype=int)
        for u, v in g.edges:
            deg[u] += 1
            deg[v] += 1
        assert deg[0] == 7
        assert validate_triangulation(g).valid

    def test_hub_buried_away_from_boundary(self):
        g, _ = collared_wheel(5, 2)
        _, isb = rotation_system(g, orient_faces(g))
        assert not isb[0]
        for u, v in g.edges:
            if u == 0:
                assert not isb[v]
            if v == 0:
                assert not isb[u]
