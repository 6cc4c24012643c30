"""Builders for the triangulations used across the package: cylinders,
hexagonal disks, platonic sphere complexes, subdivision and random
flips, and wheel-based corpora for radius-ratio studies."""

from __future__ import annotations

import numpy as np

from .graphs import Graph

__all__ = [
    "triangulated_cylinder",
    "hex_disk",
    "wheel",
    "collared_wheel",
    "tetrahedron",
    "octahedron",
    "icosahedron",
    "loop_subdivide",
    "random_sphere_triangulation",
    "random_disk_triangulation",
]


def triangulated_cylinder(n_around: int, m_levels: int, seed=None):
    """Cylinder grid with each quad split along a diagonal.  With a seed
    the diagonal directions are drawn at random, otherwise they all lean
    the same way.  Returns (graph, inner_ring, outer_ring)."""
    if n_around < 3 or m_levels < 2:
        raise ValueError("need at least 3 around and 2 levels")
    rng = np.random.default_rng(seed) if seed is not None else None

    def idx(level, k):
        return level * n_around + k

    edges = []
    faces = []
    for level in range(m_levels):
        for k in range(n_around):
            a = idx(level, k)
            b = idx(level, (k + 1) % n_around)
            edges.append((a, b))
            if level + 1 < m_levels:
                c = idx(level + 1, (k + 1) % n_around)
                d = idx(level + 1, k)
                edges.append((a, d))
                flip = bool(rng.integers(0, 2)) if rng is not None else False
                if flip:
                    edges.append((b, d))
                    faces.append((a, b, d))
                    faces.append((b, c, d))
                else:
                    edges.append((a, c))
                    faces.append((a, b, c))
                    faces.append((a, c, d))
    g = Graph.build(n_around * m_levels, edges, faces=faces)
    ring0 = [idx(0, k) for k in range(n_around)]
    ring1 = [idx(m_levels - 1, k) for k in range(n_around)]
    return g, ring0, ring1


def hex_disk(rings: int):
    """Triangular-lattice disk with the given number of rings around the
    center.  Returns (graph, coords) with unit lattice spacing; interior
    vertices all have degree 6."""
    if rings < 1:
        raise ValueError("need at least one ring")
    pts = {}
    order = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if abs(q + r) > rings:
                continue
            pts[(q, r)] = len(order)
            order.append((q, r))
    coords = np.zeros((len(order), 2))
    for (q, r), i in pts.items():
        coords[i] = (q + 0.5 * r, r * np.sqrt(3.0) / 2.0)
    edges = []
    faces = []
    for (q, r), i in pts.items():
        for dq, dr in ((1, 0), (0, 1), (-1, 1)):
            j = pts.get((q + dq, r + dr))
            if j is not None:
                edges.append((i, j))
        a = pts.get((q + 1, r))
        b = pts.get((q, r + 1))
        if a is not None and b is not None:
            faces.append((i, a, b))
        c = pts.get((q - 1, r + 1))
        if b is not None and c is not None:
            faces.append((i, b, c))
    g = Graph.build(len(order), edges, faces=faces)
    return g, coords


def wheel(d: int):
    """Wheel with a hub of degree d; hub is vertex 0."""
    if d < 3:
        raise ValueError("hub degree must be at least 3")
    edges = [(0, i) for i in range(1, d + 1)]
    faces = []
    for i in range(1, d + 1):
        j = i % d + 1
        edges.append((i, j))
        faces.append((0, i, j))
    return Graph.build(d + 1, edges, faces=faces)


def collared_wheel(d: int, collars: int):
    """Wheel whose rim is padded with triangulated collars, burying the
    hub that many layers deep inside the disk."""
    g = wheel(d)
    edges = [tuple(int(x) for x in e) for e in g.edges]
    faces = [tuple(f) for f in g.faces]
    rim = list(range(1, d + 1))
    n = g.n
    for _ in range(collars):
        new = list(range(n, n + len(rim)))
        m = len(rim)
        for i in range(m):
            a, b = rim[i], rim[(i + 1) % m]
            na, nb = new[i], new[(i + 1) % m]
            edges.append((a, na))
            edges.append((na, nb))
            edges.append((a, nb))
            faces.append((a, b, nb))
            faces.append((a, nb, na))
        n += m
        rim = new
    return Graph.build(n, edges, faces=faces), rim


def _hull_complex(points: np.ndarray) -> Graph:
    """Convex-hull triangulation with faces oriented outward."""
    from scipy.spatial import ConvexHull

    hull = ConvexHull(points)
    center = points.mean(axis=0)
    faces = []
    edges = set()
    for simplex in hull.simplices:
        a, b, c = (int(x) for x in simplex)
        normal = np.cross(points[b] - points[a], points[c] - points[a])
        if np.dot(normal, points[a] - center) < 0:
            a, b, c = a, c, b
        faces.append((a, b, c))
        edges.update({tuple(sorted(p)) for p in ((a, b), (b, c), (c, a))})
    return Graph.build(len(points), sorted(edges), faces=faces)


def tetrahedron():
    pts = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                    [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    return _hull_complex(pts), pts


def octahedron():
    pts = np.array([[1.0, 0, 0], [-1.0, 0, 0], [0, 1.0, 0],
                    [0, -1.0, 0], [0, 0, 1.0], [0, 0, -1.0]])
    return _hull_complex(pts), pts


def icosahedron():
    phi = (1 + np.sqrt(5.0)) / 2
    pts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            pts.append((0.0, a, b))
            pts.append((a, b, 0.0))
            pts.append((b, 0.0, a))
    pts = np.array(pts)
    pts /= np.linalg.norm(pts[0])
    return _hull_complex(pts), pts


def loop_subdivide(g: Graph, coords=None):
    """Split every triangle into four.  New vertices sit at edge
    midpoints (projected back to the unit sphere when coords are given
    on it); returns (graph, coords-or-None)."""
    if g.faces is None:
        raise ValueError("subdivision needs faces")
    mid = {}
    n = g.n
    for u, v in g.edges:
        mid[(int(u), int(v))] = n
        n += 1

    def m(u, v):
        return mid[(min(u, v), max(u, v))]

    faces = []
    edges = set()
    for f in g.faces:
        a, b, c = f
        ab, bc, ca = m(a, b), m(b, c), m(c, a)
        for tri in ((a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)):
            faces.append(tri)
            x, y, z = tri
            edges.update({tuple(sorted(p)) for p in ((x, y), (y, z), (z, x))})
    g2 = Graph.build(n, sorted(edges), faces=faces)
    if coords is None:
        return g2, None
    out = np.zeros((n, coords.shape[1]))
    out[:g.n] = coords
    on_sphere = np.allclose(np.linalg.norm(coords, axis=1), 1.0, atol=1e-8)
    for (u, v), k in mid.items():
        p = 0.5 * (coords[u] + coords[v])
        if on_sphere:
            p = p / np.linalg.norm(p)
        out[k] = p
    return g2, out


def sphere_triangulation(depth: int):
    """Icosahedron refined by repeated subdivision; depth 5 reaches
    10242 vertices."""
    g, pts = icosahedron()
    for _ in range(depth):
        g, pts = loop_subdivide(g, pts)
    return g, pts


def _flip_faces(n: int, faces, flips: int, rng, max_degree: int,
                boundary=frozenset()):
    """Seeded random edge flips on a triangulation.  Boundary edges are
    never flipped (they bound a single face); interior degrees stay in
    [4, max_degree] and boundary degrees keep at least 3."""
    face_set = {tuple(sorted(f)): tuple(f) for f in faces}
    edge_faces: dict[tuple, list] = {}
    deg = {v: 0 for v in range(n)}
    edges = set()
    for key in face_set:
        a, b, c = key
        for p in ((a, b), (b, c), (a, c)):
            edge_faces.setdefault(p, []).append(key)
            edges.add(p)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1

    def floor_deg(v):
        return 3 if v in boundary else 4

    done = 0
    attempts = 0
    while done < flips and attempts < 50 * flips + 100:
        attempts += 1
        pool = sorted(edges)
        u, v = pool[int(rng.integers(0, len(pool)))]
        fs = list(edge_faces[(u, v)])
        if len(fs) != 2:
            continue
        opp = []
        for key in fs:
            opp.extend(x for x in key if x != u and x != v)
        a, b = sorted(opp)
        if a == b or (a, b) in edges:
            continue
        if deg[u] <= floor_deg(u) or deg[v] <= floor_deg(v):
            continue
        if deg[a] >= max_degree or deg[b] >= max_degree:
            continue
        for key in fs:
            for p in ((key[0], key[1]), (key[1], key[2]), (key[0], key[2])):
                edge_faces[p].remove(key)
            del face_set[key]
        for tri in ((u, a, b), (v, a, b)):
            key = tuple(sorted(tri))
            face_set[key] = key
            for p in ((key[0], key[1]), (key[1], key[2]), (key[0], key[2])):
                edge_faces.setdefault(p, []).append(key)
        edges.remove((u, v))
        edges.add((a, b))
        deg[u] -= 1
        deg[v] -= 1
        deg[a] += 1
        deg[b] += 1
        done += 1
    return Graph.build(n, sorted(edges), faces=sorted(face_set.values()))


def random_sphere_triangulation(depth: int, flips: int, seed: int,
                                max_degree: int = 7):
    """Refined icosahedron randomized by seeded edge flips that keep
    every degree between 4 and max_degree."""
    g, _ = sphere_triangulation(depth)
    rng = np.random.default_rng(seed)
    return _flip_faces(g.n, g.faces, flips, rng, max_degree)


def random_disk_triangulation(rings: int, flips: int, seed: int,
                              max_degree: int = 7):
    """Hexagonal disk randomized by seeded interior edge flips; flipped
    vertices can reach max_degree, which puts high-degree circles into
    lopsided surroundings."""
    g, _ = hex_disk(rings)
    from .graphs import orient_faces, rotation_system
    _, isb = rotation_system(g, orient_faces(g))
    boundary = frozenset(v for v in range(g.n) if isb[v])
    rng = np.random.default_rng(seed)
    return _flip_faces(g.n, g.faces, flips, rng, max_degree, boundary=boundary)


__all__.append("sphere_triangulation")
