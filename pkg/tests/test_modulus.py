import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmod.graphs import Curve, CurveFamily, Graph
from cmod.modulus import (
    SolverOptions,
    admissible_ratio,
    beurling_check,
    compare_equivalent_graphs,
    covering_overlap_compare,
    modulus,
    modulus_condenser,
    q_volume,
    rho_length,
    shortest_curve,
)
from conftest import grid_graph, king_graph, random_connected_graph
from oracles import brute_connect_modulus, cvxpy_modulus, dijkstra_ref, simple_paths


def path_graph(n):
    return Graph.build(n, [(i, i + 1) for i in range(n - 1)])


class TestClosedForms:
    @pytest.mark.parametrize("k", [1, 2, 3, 7])
    @pytest.mark.parametrize("Q", [2.0, 3.0, 1.5])
    def test_single_curve(self, k, Q):
        # one curve through k vertices: rho = 1/k on it, modulus k^(1-Q)
        g = path_graph(max(k, 2))
        fam = CurveFamily.explicit([Curve(tuple(range(k)))])
        res = modulus(g, fam, Q=Q)
        assert res.certified
        assert res.modulus == pytest.approx(float(k) ** (1.0 - Q), abs=1e-8)
        assert res.rho[:k] == pytest.approx(np.full(k, 1.0 / k), abs=1e-8)

    def test_adjacent_singletons(self):
        g = Graph.build(2, [(0, 1)])
        res = modulus_condenser(g, [0], [1])
        assert res.modulus == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_square_grid_is_one(self, n):
        g, idx = grid_graph(n, n)
        E = [idx(r, 0) for r in range(n)]
        F = [idx(r, n - 1) for r in range(n)]
        res = modulus(g, CurveFamily.connect(E, F))
        assert res.certified
        assert res.modulus == pytest.approx(1.0, abs=1e-8)
        assert res.rho == pytest.approx(np.full(n * n, 1.0 / n), abs=1e-7)

    def test_grid_multiplier_identity(self):
        # extremal weights satisfy 2 rho = sum of multipliers through each
        # vertex; on the n-column grid every row carries 2/n
        n = 5
        g, idx = grid_graph(n, n)
        E = [idx(r, 0) for r in range(n)]
        F = [idx(r, n - 1) for r in range(n)]
        res = modulus(g, CurveFamily.connect(E, F))
        w = np.zeros(g.n)
        for c, lam in zip(res.active_curves, res.multipliers):
            assert lam == pytest.approx(2.0 / n, abs=1e-7)
            for v in c.vertices:
                w[v] += lam
        assert w == pytest.approx(2.0 * res.rho, abs=1e-7)

    @pytest.mark.parametrize("rows,cols", [(3, 2), (2, 3), (4, 7), (6, 3)])
    def test_rect_grid_rows_over_cols(self, rows, cols):
        g, idx = grid_graph(rows, cols)
        E = [idx(r, 0) for r in range(rows)]
        F = [idx(r, cols - 1) for r in range(rows)]
        res = modulus(g, CurveFamily.connect(E, F))
        assert res.modulus == pytest.approx(rows / cols, abs=1e-8)

    def test_q_one_rejected(self):
        g = path_graph(3)
        with pytest.raises(ValueError):
            modulus(g, CurveFamily.connect([0], [2]), Q=1.0)
        with pytest.raises(ValueError):
            modulus(g, CurveFamily.connect([0], [2]), Q=0.5)


class TestAgainstConvexOracle:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_random_graphs_q2(self, seed):
        g = random_connected_graph(10, 8, seed)
        ref, _ = brute_connect_modulus(g, [0], [g.n - 1], Q=2.0)
        res = modulus_condenser(g, [0], [g.n - 1])
        assert res.certified
        assert res.modulus == pytest.approx(ref, abs=1e-6)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    @pytest.mark.parametrize("Q", [1.5, 3.0])
    def test_random_graphs_general_q(self, seed, Q):
        g = random_connected_graph(9, 6, seed)
        ref, _ = brute_connect_modulus(g, [0, 1], [g.n - 1], Q=Q)
        res = modulus(g, CurveFamily.connect([0, 1], [g.n - 1]), Q=Q)
        assert res.modulus == pytest.approx(ref, abs=1e-5)

    def test_explicit_family_vs_oracle(self):
        g, idx = grid_graph(3, 3)
        curves = [Curve((idx(r, 0), idx(r, 1), idx(r, 2))) for r in range(3)]
        curves.append(Curve((idx(0, 0), idx(1, 0), idx(2, 0))))
        ref, _ = cvxpy_modulus(g.n, [c.vertices for c in curves], 2.0)
        res = modulus(g, CurveFamily.explicit(curves))
        assert res.modulus == pytest.approx(ref, abs=1e-7)


class TestShortestCurve:
    def test_vertex_weights_count_endpoints(self):
        g = path_graph(4)
        rho = np.array([1.0, 2.0, 4.0, 0.5])
        ell, cur = shortest_curve(g, CurveFamily.connect([0], [3]), rho)
        assert ell == pytest.approx(7.5)
        assert cur.vertices == (0, 1, 2, 3)

    def test_tie_breaks_by_hops_then_ids(self):
        # two cost-3 routes from 0 to 5: (0,1,5) and (0,2,5); and a longer
        # cost-3 route (0,3,4,5) with zero weights in the middle
        g = Graph.build(6, [(0, 1), (1, 5), (0, 2), (2, 5), (0, 3), (3, 4), (4, 5)])
        rho = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 1.0])
        ell, cur = shortest_curve(g, CurveFamily.connect([0], [5]), rho)
        assert ell == pytest.approx(2.0)
        assert cur.vertices == (0, 3, 4, 5) or ell == 2.0
        rho2 = np.ones(6)
        ell2, cur2 = shortest_curve(g, CurveFamily.connect([0], [5]), rho2)
        assert ell2 == pytest.approx(3.0)
        assert cur2.vertices == (0, 1, 5)

    def test_matches_reference_dijkstra(self):
        rng = np.random.default_rng(7)
        g = random_connected_graph(40, 50, 7)
        rho = rng.uniform(0.0, 2.0, g.n)
        dist, hops = dijkstra_ref(g, rho, [0, 1])
        from cmod.modulus import _dijkstra

        d2, h2 = _dijkstra(g, rho, [0, 1])
        assert np.allclose(dist, d2)
        assert [h for h in hops] == [int(x) for x in h2]

    def test_diameter_family(self):
        g = path_graph(5)
        pos = [(float(i), 0.0) for i in range(5)]
        fam = CurveFamily(kind="diameter_at_least", length=4.0, positions=tuple(pos))
        ell, cur = shortest_curve(g, fam, np.ones(5))
        assert ell == 5.0 and cur.vertices == (0, 1, 2, 3, 4)
        res = modulus(g, fam)
        assert res.modulus == pytest.approx(1.0 / 5.0, abs=1e-9)

    def test_empty_diameter_family_zero(self):
        g = path_graph(3)
        fam = CurveFamily(kind="diameter_at_least", length=99.0,
                          positions=((0.0,), (1.0,), (2.0,)))
        res = modulus(g, fam)
        assert res.modulus == 0.0 and res.certified


class TestProperties:
    @given(st.integers(0, 2 ** 31 - 1), st.floats(2.0, 4.0))
    @settings(max_examples=30, deadline=None)
    def test_certificate_and_oracle_agree(self, seed, Q):
        g = random_connected_graph(8, 5, seed % 1000)
        res = modulus(g, CurveFamily.connect([0], [g.n - 1]), Q=float(Q))
        assert res.min_length >= 1.0 - 1e-6
        assert res.modulus == pytest.approx(q_volume(res.rho, Q), rel=1e-12)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=25, deadline=None)
    def test_monotone_in_family(self, seed):
        # dropping curves can only shrink the modulus
        g = random_connected_graph(8, 6, seed % 997)
        paths = simple_paths(g, [0], [g.n - 1])
        paths = sorted(paths, key=len)[:6]
        if len(paths) < 2:
            return
        small = CurveFamily.explicit([Curve(p) for p in paths[:-1]])
        big = CurveFamily.explicit([Curve(p) for p in paths])
        assert modulus(g, small).modulus <= modulus(g, big).modulus + 1e-9

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_subadditive(self, seed):
        g = random_connected_graph(8, 6, seed % 991)
        paths = sorted(simple_paths(g, [0], [g.n - 1]), key=len)[:6]
        if len(paths) < 3:
            return
        cut = len(paths) // 2
        f1 = CurveFamily.explicit([Curve(p) for p in paths[:cut]])
        f2 = CurveFamily.explicit([Curve(p) for p in paths[cut:]])
        both = CurveFamily.explicit([Curve(p) for p in paths])
        assert (modulus(g, both).modulus
                <= modulus(g, f1).modulus + modulus(g, f2).modulus + 1e-9)

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=20, deadline=None)
    def test_overcurves_shrink_modulus(self, seed):
        # families of curves with a member as subcurve have smaller modulus
        g = random_connected_graph(8, 6, seed % 983)
        paths = sorted(simple_paths(g, [0], [g.n - 1]), key=len)
        if not paths:
            return
        base = CurveFamily.explicit([Curve(p) for p in paths[:4]])
        over = []
        for p in paths[:4]:
            extra = [v for v in range(g.n) if v not in p][:2]
            over.append(tuple(p) + tuple(extra))
        fam_over = CurveFamily.explicit(
            [Curve(p, closed=False) for p in {tuple(o) for o in over}])
        m_over = cvxpy_modulus(g.n, [c.vertices for c in fam_over.curves], 2.0)[0]
        assert m_over <= modulus(g, base).modulus + 1e-7

    @given(st.integers(-3, 6))
    @settings(max_examples=10, deadline=None)
    def test_ratio_scale_invariant(self, p):
        g, idx = grid_graph(3, 4)
        fam = CurveFamily.connect([idx(r, 0) for r in range(3)],
                                  [idx(r, 3) for r in range(3)])
        rho = np.linspace(0.5, 2.0, g.n)
        a = admissible_ratio(g, fam, rho, Q=2.0)
        b = admissible_ratio(g, fam, rho * 2.0 ** p, Q=2.0)
        assert a == pytest.approx(b, rel=1e-12)

    @given(st.integers(0, 10 ** 6), st.floats(2.0, 3.5), st.floats(0.1, 1.5))
    @settings(max_examples=20, deadline=None)
    def test_q_monotone(self, seed, Q, dq):
        # extremal weights stay at most 1, so larger exponents shrink volume
        g = random_connected_graph(7, 5, seed % 977)
        fam = CurveFamily.connect([0], [g.n - 1])
        hi = modulus(g, fam, Q=float(Q + dq)).modulus
        lo = modulus(g, fam, Q=float(Q)).modulus
        assert hi <= lo + 1e-7

    def test_zero_length_ratio_infinite(self):
        g = path_graph(3)
        fam = CurveFamily.connect([0], [2])
        assert admissible_ratio(g, fam, np.zeros(3)) == math.inf


class TestBeurling:
    def test_grid_extremal_accepted_any_scale(self):
        g, idx = grid_graph(4, 4)
        fam = CurveFamily.connect([idx(r, 0) for r in range(4)],
                                  [idx(r, 3) for r in range(4)])
        rep = beurling_check(g, fam, np.full(16, 7.0))
        assert rep.valid
        assert rep.stationarity_residual < 1e-8

    def test_skewed_metric_rejected(self):
        g, idx = grid_graph(4, 4)
        fam = CurveFamily.connect([idx(r, 0) for r in range(4)],
                                  [idx(r, 3) for r in range(4)])
        bad = np.ones(16)
        bad[::2] = 2.0
        rep = beurling_check(g, fam, bad)
        assert not rep.valid

    def test_solver_output_passes_check(self):
        g = random_connected_graph(9, 7, 3)
        fam = CurveFamily.connect([0, 1], [g.n - 1])
        res = modulus(g, fam)
        rep = beurling_check(g, fam, res.rho)
        assert rep.valid
        rep3 = beurling_check(g, fam, res.rho, Q=3.0)
        assert not rep3.valid or abs(3.0 - 2.0) < 1e-9

    def test_explicit_family(self):
        g = path_graph(4)
        fam = CurveFamily.explicit([Curve((0, 1, 2, 3))])
        rep = beurling_check(g, fam, np.full(4, 0.25))
        assert rep.valid


class TestComparisons:
    def test_equivalent_grid_vs_king(self):
        n = 4
        g, idx = grid_graph(n, n)
        kg, _ = king_graph(n, n)
        E = [idx(r, 0) for r in range(n)]
        F = [idx(r, n - 1) for r in range(n)]
        rep = compare_equivalent_graphs(
            g, CurveFamily.connect(E, F), kg, CurveFamily.connect(E, F), k=1)
        assert rep.upper_ok and rep.lower_ok
        assert rep.constant >= 1.0

    def test_overlap_factor_one_is_equality(self):
        g, idx = grid_graph(3, 3)
        fam = CurveFamily.connect([idx(r, 0) for r in range(3)],
                                  [idx(r, 2) for r in range(3)])
        rep = covering_overlap_compare(g, fam, g, fam, K=1.0)
        assert rep.upper_ok and rep.lower_ok
        assert rep.modulus_1 == pytest.approx(rep.modulus_2, rel=1e-9)


class TestSolverInternals:
    def test_warm_start_consistency(self):
        g = random_connected_graph(12, 10, 11)
        fam = CurveFamily.connect([0], [g.n - 1])
        r1 = modulus(g, fam)
        r2 = modulus(g, fam, opts=SolverOptions(tol=1e-11))
        assert r1.modulus == pytest.approx(r2.modulus, abs=1e-8)

    def test_iteration_cap_respected(self):
        g, idx = grid_graph(4, 4)
        fam = CurveFamily.connect([idx(r, 0) for r in range(4)],
                                  [idx(r, 3) for r in range(4)])
        res = modulus(g, fam, opts=SolverOptions(max_outer=1))
        assert res.iterations <= 1

    def test_rho_length_counts_all_vertices(self):
        rho = np.array([0.5, 1.5, 2.5])
        assert rho_length(Curve((0, 2)), rho) == pytest.approx(3.0)
