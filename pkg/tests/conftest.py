import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))

from cmod.graphs import Graph


def grid_graph(rows, cols):
    """Grid with unit steps; returns (graph, index function)."""

    def idx(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < rows:
                edges.append((idx(r, c), idx(r + 1, c)))
    return Graph.build(rows * cols, edges), idx


def king_graph(rows, cols):
    """Grid plus diagonal moves."""

    def idx(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                rr, cc = r + dr, c + dc
                if 0 <= rr < rows and 0 <= cc < cols:
                    edges.append((idx(r, c), idx(rr, cc)))
    return Graph.build(rows * cols, edges), idx


def random_connected_graph(n, extra_edges, seed):
    """Random tree plus extra random edges; connected by construction."""
    rng = np.random.default_rng(seed)
    edges = set()
    for v in range(1, n):
        edges.add((int(rng.integers(0, v)), v))
    tries = 0
    while len(edges) < n - 1 + extra_edges and tries < 50 * extra_edges + 50:
        u, v = sorted(rng.integers(0, n, size=2).tolist())
        tries += 1
        if u != v:
            edges.add((u, v))
    return Graph.build(n, sorted(edges))


def cylinder_graph(n_around, m_levels):
    """n-cycle crossed with an m-path: the quadrilateral surface grid whose
    ends are the first and last rings."""

    def idx(level, k):
        return level * n_around + k

    edges = []
    faces = []
    for level in range(m_levels):
        for k in range(n_around):
            edges.append((idx(level, k), idx(level, (k + 1) % n_around)))
            if level + 1 < m_levels:
                edges.append((idx(level, k), idx(level + 1, k)))
                faces.append((idx(level, k), idx(level, (k + 1) % n_around),
                              idx(level + 1, (k + 1) % n_around), idx(level + 1, k)))
    g = Graph.build(n_around * m_levels, edges, faces=faces)
    ring0 = [idx(0, k) for k in range(n_around)]
    ring1 = [idx(m_levels - 1, k) for k in range(n_around)]
    return g, ring0, ring1
