import numpy as np
import pytest

from cmod.graphs import (
    Condenser,
    Covering,
    Curve,
    CurveFamily,
    Graph,
    GraphError,
    bfs_distances,
    combinatorial_distance,
    graph_from_dict,
    graph_to_dict,
    nerve,
    orient_faces,
    rotation_system,
    thicken_condenser,
    validate_triangulation,
)
from conftest import grid_graph, king_graph


def hex_wheel():
    edges = [(0, k) for k in range(1, 7)]
    edges += [(k, k % 6 + 1) for k in range(1, 7)]
    faces = [(0, k, k % 6 + 1) for k in range(1, 7)]
    return Graph.build(7, edges, faces=faces)


class TestGraphBuild:
    def test_neighbors_sorted_and_deduped(self):
        g = Graph.build(4, [(2, 1), (1, 2), (0, 1), (3, 1), (0, 3)])
        assert list(g.neighbors(1)) == [0, 2, 3]
        assert g.m == 4

    def test_king_graph_edge_count(self):
        g, _ = king_graph(3, 3)
        assert g.m == 20

    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            Graph.build(2, [(0, 0), (0, 1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphError):
            Graph.build(2, [(0, 5)])

    def test_rejects_disconnected(self):
        with pytest.raises(GraphError):
            Graph.build(4, [(0, 1), (2, 3)])

    def test_rejects_face_without_edge(self):
        with pytest.raises(GraphError):
            Graph.build(4, [(0, 1), (1, 2), (2, 3), (3, 0)], faces=[(0, 1, 2)])

    def test_arrays_read_only(self):
        g = Graph.build(2, [(0, 1)])
        with pytest.raises(ValueError):
            g.nbrs[0] = 5

    def test_dict_roundtrip(self):
        g, _ = grid_graph(2, 3)
        d = graph_to_dict(g)
        h = graph_from_dict(d)
        assert h.n == g.n and np.array_equal(h.edges, g.edges)

    def test_dict_rejects_sparse_ids(self):
        with pytest.raises(GraphError):
            graph_from_dict({"vertices": [0, 2], "edges": [[0, 2]]})


class TestCurves:
    def test_rejects_revisit(self):
        with pytest.raises(GraphError):
            Curve((0, 1, 0))

    def test_validate_needs_edges(self):
        g = Graph.build(3, [(0, 1), (1, 2)])
        Curve((0, 1, 2)).validate(g)
        with pytest.raises(GraphError):
            Curve((0, 2)).validate(g)

    def test_cycle_key_canonical(self):
        a = Curve((0, 1, 2, 3), closed=True)
        b = Curve((2, 1, 0, 3), closed=True)
        assert a.key() == b.key()

    def test_path_key_reversal(self):
        assert Curve((3, 1, 0)).key() == Curve((0, 1, 3)).key()

    def test_condenser_disjoint(self):
        with pytest.raises(GraphError):
            Condenser((0, 1), (1, 2))

    def test_family_kinds(self):
        with pytest.raises(GraphError):
            CurveFamily(kind="explicit")
        with pytest.raises(GraphError):
            CurveFamily(kind="connect")
        with pytest.raises(GraphError):
            CurveFamily(kind="nonsense")


class TestCoveringNerve:
    def test_nerve_builds_graph(self):
        cov = Covering(3, ((0, 1), (1, 2), (0, 2), (1, 0)))
        g = nerve(cov)
        assert g.m == 3

    def test_disconnected_nerve_reports_components(self):
        cov = Covering(4, ((0, 1), (2, 3)))
        with pytest.raises(GraphError, match="2 components"):
            nerve(cov)


class TestTriangulation:
    def test_tetrahedron_closed(self):
        g = Graph.build(4, [(i, j) for i in range(4) for j in range(i + 1, 4)],
                        faces=[(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
        rep = validate_triangulation(g)
        assert rep.valid and rep.closed

    def test_hex_wheel_is_disk(self):
        rep = validate_triangulation(hex_wheel())
        assert rep.valid and not rep.closed
        rep2 = validate_triangulation(hex_wheel(), require_closed=True)
        assert not rep2.valid

    def test_edge_in_three_faces_invalid(self):
        g = Graph.build(5, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (1, 4)],
                        faces=[(0, 1, 2), (0, 1, 3), (0, 1, 4)])
        rep = validate_triangulation(g)
        assert not rep.valid
        assert any("3 faces" in r for r in rep.reasons)

    def test_quad_face_invalid(self):
        g = Graph.build(4, [(0, 1), (1, 2), (2, 3), (3, 0)], faces=[(0, 1, 2, 3)])
        assert not validate_triangulation(g).valid


class TestRotationSystem:
    def test_hex_wheel_orders(self):
        g = hex_wheel()
        rot, boundary = rotation_system(g, orient_faces(g))
        assert sorted(rot[0]) == [1, 2, 3, 4, 5, 6]
        assert len(rot[0]) == 6 and not boundary[0]
        # interior order is the 6-cycle around the hub
        order = rot[0]
        for i in range(6):
            assert g.has_edge(order[i], order[(i + 1) % 6])
        for v in range(1, 7):
            assert boundary[v]
            assert len(rot[v]) == 3

    def test_orientation_consistent(self):
        g = hex_wheel()
        oriented = orient_faces(g)
        seen = set()
        for f in oriented:
            for i in range(3):
                d = (f[i], f[(i + 1) % 3])
                assert d not in seen
                seen.add(d)


class TestDistances:
    def test_path_distance(self):
        g = Graph.build(4, [(0, 1), (1, 2), (2, 3)])
        assert combinatorial_distance(g, 0, 3) == 3

    def test_bfs_multi_source(self):
        g, idx = grid_graph(3, 3)
        d = bfs_distances(g, [idx(0, 0), idx(2, 2)])
        assert d[idx(1, 1)] == 2 and d[idx(0, 2)] == 2


class TestThicken:
    def test_reconnects_sides(self):
        path = Graph.build(21, [(i, i + 1) for i in range(20)])
        chords = [(i, i + 1) for i in range(20)] + [(i, i + 2) for i in range(19)]
        g1 = Graph.build(21, chords)
        cond = Condenser((0, 2), (20,))
        fixed = thicken_condenser(g1, path, cond, k=2)
        assert fixed.E == (0, 1, 2)
        assert fixed.F == (20,)

    def test_rejects_close_sides(self):
        path = Graph.build(8, [(i, i + 1) for i in range(7)])
        g1 = Graph.build(8, [(i, i + 1) for i in range(7)] + [(i, i + 2) for i in range(6)])
        with pytest.raises(GraphError, match="apart"):
            thicken_condenser(g1, path, Condenser((0, 2), (7,)), k=2)

    def test_rejects_distant_edge(self):
        path = Graph.build(30, [(i, i + 1) for i in range(29)])
        g1 = Graph.build(30, [(i, i + 1) for i in range(29)] + [(0, 29)])
        with pytest.raises(GraphError, match="exceeds"):
            thicken_condenser(g1, path, Condenser((0,), (15,)), k=2)
