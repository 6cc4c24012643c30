"""Graphs, curves, curve families, condensers, and coverings.

Vertex ids are dense integers 0..n-1.  A Graph is immutable after
construction; adjacency is kept in CSR form with neighbor lists sorted
ascending so that every traversal in the package is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Graph",
    "Curve",
    "CurveFamily",
    "Condenser",
    "Covering",
    "TriangulationReport",
    "nerve",
    "validate_triangulation",
    "combinatorial_distance",
    "bfs_distances",
    "thicken_condenser",
    "rotation_system",
    "orient_faces",
    "graph_to_dict",
    "graph_from_dict",
]


class GraphError(ValueError):
    """Raised for malformed graphs, families, or condensers."""


@dataclass(eq=False)
class Graph:
    """Undirected simple connected graph on vertices 0..n-1.

    ``faces`` optionally carries a polygonal embedding (tuples of vertex
    ids); triangulation-dependent operations require it.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    nbrs: np.ndarray
    faces: tuple[tuple[int, ...], ...] | None = None

    @staticmethod
    def build(n: int, edges, faces=None) -> "Graph":
        if n <= 0:
            raise GraphError("graph needs at least one vertex")
        e = np.asarray(sorted(set((min(u, v), max(u, v)) for u, v in edges)), dtype=np.int64)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise GraphError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphError("self-loops are not allowed")
        else:
            e = e.reshape(0, 2)
        deg = np.zeros(n, dtype=np.int64)
        for u, v in e:
            deg[u] += 1
            deg[v] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        nbrs = np.empty(indptr[-1], dtype=np.int64)
        fill = indptr[:-1].copy()
        for u, v in e:
            nbrs[fill[u]] = v
            fill[u] += 1
            nbrs[fill[v]] = u
            fill[v] += 1
        for v in range(n):
            nbrs[indptr[v]:indptr[v + 1]].sort()
        g = Graph(n=n, edges=e, indptr=indptr, nbrs=nbrs,
                  faces=tuple(tuple(int(x) for x in f) for f in faces) if faces is not None else None)
        if g.faces is not None:
            for f in g.faces:
                if len(f) < 3 or len(set(f)) != len(f):
                    raise GraphError(f"malformed face {f}")
                for i in range(len(f)):
                    if not g.has_edge(f[i], f[(i + 1) % len(f)]):
                        raise GraphError(f"face {f} uses a missing edge")
        if n > 1:
            dist = bfs_distances(g, [0])
            if np.any(dist < 0):
                raise GraphError("graph is not connected")
        for arr in (g.edges, g.indptr, g.nbrs):
            arr.setflags(write=False)
        return g

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbrs[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < row.size and row[i] == v

    @property
    def m(self) -> int:
        return self.edges.shape[0]


def bfs_distances(g: Graph, sources) -> np.ndarray:
    """Hop distances from a source set; -1 marks unreachable vertices."""
    dist = np.full(g.n, -1, dtype=np.int64)
    queue = []
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(int(s))
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for u in g.neighbors(v):
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(int(u))
    return dist


def combinatorial_distance(g: Graph, u: int, v: int) -> int:
    """Edge-count distance between two vertices."""
    d = int(bfs_distances(g, [u])[v])
    if d < 0:
        raise GraphError(f"{u} and {v} are not connected")
    return d


@dataclass(frozen=True)
class Curve:
    """Walk through distinct vertices; consecutive entries are adjacent.

    ``closed`` additionally requires the last vertex adjacent to the first
    (separating cycles).  The weight support of the curve is its vertex set.
    """

    vertices: tuple[int, ...]
    closed: bool = False

    def __post_init__(self):
        if len(self.vertices) == 0:
            raise GraphError("empty curve")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("curve revisits a vertex")

    def validate(self, g: Graph) -> None:
        vs = self.vertices
        for i in range(len(vs) - 1):
            if not g.has_edge(vs[i], vs[i + 1]):
                raise GraphError(f"curve step {vs[i]}-{vs[i + 1]} is not an edge")
        if self.closed and len(vs) > 2 and not g.has_edge(vs[-1], vs[0]):
            raise GraphError("closing edge missing for cycle curve")

    def key(self) -> tuple[int, ...]:
        """Canonical identity: cycles are rotated/reflected to start at
        their unique smallest vertex, paths compared to their reversal."""
        cached = getattr(self, "_key", None)
        if cached is not None:
            return cached
        vs = self.vertices
        if not self.closed:
            best = min(vs, vs[::-1])
        else:
            i = vs.index(min(vs))
            fwd = vs[i:] + vs[:i]
            rev = vs[i::-1] + vs[:i:-1]
            best = min(fwd, rev)
        object.__setattr__(self, "_key", best)
        return best


@dataclass(frozen=True)
class Condenser:
    """Disjoint nonempty vertex sets (E, F) to be joined or separated."""

    E: tuple[int, ...]
    F: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "E", tuple(sorted(set(int(v) for v in self.E))))
        object.__setattr__(self, "F", tuple(sorted(set(int(v) for v in self.F))))
        if not self.E or not self.F:
            raise GraphError("condenser sides must be nonempty")
        if set(self.E) & set(self.F):
            raise GraphError("condenser sides must be disjoint")

    def validate(self, g: Graph) -> None:
        for v in self.E + self.F:
            if not (0 <= v < g.n):
                raise GraphError(f"condenser vertex {v} out of range")


@dataclass(frozen=True)
class CurveFamily:
    """Family of curves on a host graph.

    kind is one of:
      * ``explicit``   -- ``curves`` lists the members.
      * ``connect``    -- curves meeting both sides of ``condenser``.
      * ``separate``   -- cycles separating the two boundaries of a planar
                          annulus; ``annulus`` (surface module) supplies the
                          embedding data.
      * ``diameter_at_least`` -- curves of host-metric diameter >= ``length``
                          given per-vertex ``positions``; experiments only.
    """

    kind: str
    curves: tuple[Curve, ...] = ()
    condenser: Condenser | None = None
    annulus: object = None
    length: float = 0.0
    positions: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("explicit", "connect", "separate", "diameter_at_least"):
            raise GraphError(f"unknown family kind {self.kind!r}")
        if self.kind == "explicit" and not self.curves:
            raise GraphError("explicit family needs at least one curve")
        if self.kind in ("connect", "separate") and self.condenser is None:
            raise GraphError(f"{self.kind} family needs a condenser")
        if self.kind == "diameter_at_least":
            if self.positions is None or self.length <= 0:
                raise GraphError("diameter family needs positions and length > 0")

    @staticmethod
    def explicit(curves) -> "CurveFamily":
        return CurveFamily(kind="explicit", curves=tuple(curves))

    @staticmethod
    def connect(E, F) -> "CurveFamily":
        return CurveFamily(kind="connect", condenser=Condenser(tuple(E), tuple(F)))

    def validate(self, g: Graph) -> None:
        if self.kind == "explicit":
            for c in self.curves:
                c.validate(g)
        elif self.condenser is not None:
            self.condenser.validate(g)


@dataclass(frozen=True)
class Covering:
    """Pieces of a covering known only through their intersection relation.

    Geometry stays with the caller; the nerve is built from ``incidence``
    pairs (i, j), i != j, meaning pieces i and j intersect.
    """

    n_pieces: int
    incidence: tuple[tuple[int, int], ...]
    labels: tuple | None = None

    def __post_init__(self):
        pairs = set()
        for i, j in self.incidence:
            if i == j:
                continue
            if not (0 <= i < self.n_pieces and 0 <= j < self.n_pieces):
                raise GraphError("incidence index out of range")
            pairs.add((min(i, j), max(i, j)))
        object.__setattr__(self, "incidence", tuple(sorted(pairs)))


def nerve(cov: Covering) -> Graph:
    """Nerve graph of a covering: one vertex per piece, an edge per
    intersecting pair.  Disconnected coverings are rejected with the
    component breakdown in the message."""
    try:
        return Graph.build(cov.n_pieces, cov.incidence)
    except GraphError:
        comp = _components(cov.n_pieces, cov.incidence)
        raise GraphError(
            f"nerve is disconnected: {len(comp)} components with sizes "
            f"{sorted(len(c) for c in comp)}"
        )


def _components(n, pairs):
    adj = [[] for _ in range(n)]
    for i, j in pairs:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        head = 0
        while head < len(comp):
            v = comp[head]
            head += 1
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
        out.append(comp)
    return out


@dataclass
class TriangulationReport:
    valid: bool
    reasons: list[str] = field(default_factory=list)
    n_vertices: int = 0
    n_edges: int = 0
    n_faces: int = 0
    closed: bool = False


def validate_triangulation(g: Graph, require_closed: bool = False) -> TriangulationReport:
    """Check that the declared faces triangulate a closed surface (every
    edge in exactly two faces, vertex links single cycles) or a disk
    (boundary edges in one face, links cycles or single fans)."""
    rep = TriangulationReport(valid=True, n_vertices=g.n, n_edges=g.m,
                              n_faces=0 if g.faces is None else len(g.faces))
    if g.faces is None:
        rep.valid = False
        rep.reasons.append("no faces declared")
        return rep
    for f in g.faces:
        if len(f) != 3:
            rep.valid = False
            rep.reasons.append(f"face {f} is not a triangle")
    if not rep.valid:
        return rep
    count = {}
    for f in g.faces:
        for i in range(3):
            e = (min(f[i], f[(i + 1) % 3]), max(f[i], f[(i + 1) % 3]))
            count[e] = count.get(e, 0) + 1
    for u, v in g.edges:
        c = count.get((int(u), int(v)), 0)
        if c == 0 or c > 2:
            rep.valid = False
            rep.reasons.append(f"edge ({u},{v}) lies in {c} faces")
    if len(count) != g.m:
        rep.valid = False
        rep.reasons.append("faces use edges missing from the graph")
    if not rep.valid:
        return rep
    boundary_edges = sum(1 for c in count.values() if c == 1)
    rep.closed = boundary_edges == 0
    euler = g.n - g.m + len(g.faces)
    want = 2 if rep.closed else 1
    if euler != want:
        rep.valid = False
        rep.reasons.append(f"Euler characteristic {euler}, expected {want}")
    if rep.valid:
        try:
            rotation_system(g, orient_faces(g))
        except GraphError as exc:
            rep.valid = False
            rep.reasons.append(str(exc))
    if require_closed and not rep.closed:
        rep.valid = False
        rep.reasons.append("surface has boundary")
    return rep


def orient_faces(g: Graph) -> tuple[tuple[int, ...], ...]:
    """Orient the declared faces consistently (adjacent faces traverse their
    shared edge in opposite directions).  Fails on non-orientable input."""
    if g.faces is None:
        raise GraphError("graph has no faces")
    faces = [tuple(f) for f in g.faces]
    by_edge = {}
    for idx, f in enumerate(faces):
        k = len(f)
        for i in range(k):
            e = (min(f[i], f[(i + 1) % k]), max(f[i], f[(i + 1) % k]))
            by_edge.setdefault(e, []).append(idx)
    oriented: list[tuple[int, ...] | None] = [None] * len(faces)
    for start in range(len(faces)):
        if oriented[start] is not None:
            continue
        oriented[start] = faces[start]
        stack = [start]
        while stack:
            idx = stack.pop()
            f = oriented[idx]
            k = len(f)
            directed = {(f[i], f[(i + 1) % k]) for i in range(k)}
            for i in range(k):
                e = (min(f[i], f[(i + 1) % k]), max(f[i], f[(i + 1) % k]))
                for jdx in by_edge[e]:
                    if jdx == idx:
                        continue
                    h = faces[jdx]
                    kk = len(h)
                    hdir = {(h[t], h[(t + 1) % kk]) for t in range(kk)}
                    flip = bool(directed & hdir)
                    cand = tuple(reversed(h)) if flip else h
                    if oriented[jdx] is None:
                        oriented[jdx] = cand
                        stack.append(jdx)
                    else:
                        cdir = {(oriented[jdx][t], oriented[jdx][(t + 1) % kk]) for t in range(kk)}
                        if directed & cdir:
                            raise GraphError("faces are not orientable consistently")
    return tuple(oriented)  # type: ignore[arg-type]


def rotation_system(g: Graph, oriented):
    """Cyclic (interior) or linear (boundary) neighbor order per vertex.

    Returns (rotations, is_boundary): rotations[v] lists the neighbors of v
    in the rotation order induced by the oriented faces; for boundary
    vertices the list is the open fan between the two boundary edges.
    """
    succ = [dict() for _ in range(g.n)]
    for f in oriented:
        k = len(f)
        for i in range(k):
            v = f[i]
            nxt = f[(i + 1) % k]
            prv = f[(i - 1) % k]
            if nxt in succ[v]:
                raise GraphError(f"vertex {v}: inconsistent rotation (face overlap)")
            succ[v][nxt] = prv
    rotations = []
    is_boundary = np.zeros(g.n, dtype=bool)
    for v in range(g.n):
        nb = list(g.neighbors(v))
        if not nb:
            rotations.append([])
            continue
        mapping = succ[v]
        if set(mapping) - set(nb):
            raise GraphError(f"vertex {v}: faces use non-neighbors")
        targets = set(mapping.values())
        starts = [u for u in nb if u not in targets]
        if len(starts) == 0:
            if len(mapping) != len(nb):
                raise GraphError(f"vertex {v}: link is not a single cycle")
            order = [min(nb)]
            while len(order) < len(nb):
                nxt = mapping[order[-1]]
                if nxt in order:
                    raise GraphError(f"vertex {v}: link is not a single cycle")
                order.append(nxt)
            if mapping[order[-1]] != order[0]:
                raise GraphError(f"vertex {v}: link is not a single cycle")
        elif len(starts) == 1:
            is_boundary[v] = True
            order = [starts[0]]
            while order[-1] in mapping:
                nxt = mapping[order[-1]]
                if nxt in order:
                    raise GraphError(f"vertex {v}: boundary link is tangled")
                order.append(nxt)
            if len(order) != len(nb):
                raise GraphError(f"vertex {v}: link is not a single fan")
        else:
            raise GraphError(f"vertex {v}: link splits into {len(starts)} fans")
        rotations.append(order)
    return rotations, is_boundary


def thicken_condenser(g1: Graph, g2: Graph, cond: Condenser, k: int) -> Condenser:
    """Repair a condenser of g1 for use on a sparser equivalent graph g2.

    Every g1-edge must have its endpoints within g2-distance k, and the two
    sides must be more than 2k+1 apart in g1.  Each side is made
    g2-connected by adding shortest g2-paths (length <= k) between its
    g1-adjacent fragments, smallest vertex pair first.
    """
    if g1.n != g2.n:
        raise GraphError("graphs must share their vertex set")
    g1_pairs = {(int(u), int(v)) for u, v in g1.edges}
    if not {(int(u), int(v)) for u, v in g2.edges} <= g1_pairs:
        raise GraphError("second graph must be a subgraph of the first")
    for u, v in g1.edges:
        d = _bounded_dist(g2, int(u), int(v), k)
        if d < 0:
            raise GraphError(f"edge ({u},{v}) of g1 exceeds g2-distance {k}")
    dE = bfs_distances(g1, cond.E)
    if min(int(dE[f]) for f in cond.F) <= 2 * k + 1:
        raise GraphError(f"condenser sides must be more than {2 * k + 1} apart in g1")

    def grow(side):
        cur = set(side)
        while True:
            comp = _induced_components(g2, cur)
            if len(comp) <= 1:
                break
            label = {}
            for ci, c in enumerate(comp):
                for v in c:
                    label[v] = ci
            best = None
            for u, v in g1.edges:
                u, v = int(u), int(v)
                if u in cur and v in cur and label[u] != label[v]:
                    cand = (min(u, v), max(u, v))
                    if best is None or cand < best:
                        best = cand
            if best is None:
                raise GraphError("side cannot be reconnected through g1 edges")
            path = _lex_shortest_path(g2, best[0], best[1])
            if len(path) - 2 > k:
                raise GraphError("reconnection path exceeds the distance bound")
            cur.update(path)
        return tuple(sorted(cur))

    E2 = grow(cond.E)
    F2 = grow(cond.F)
    if set(E2) & set(F2):
        raise GraphError("thickened sides intersect; distance precondition too tight")
    return Condenser(E2, F2)


def _bounded_dist(g: Graph, u: int, v: int, cap: int) -> int:
    if u == v:
        return 0
    dist = {u: 0}
    frontier = [u]
    for d in range(1, cap + 1):
        nxt = []
        for x in frontier:
            for y in g.neighbors(x):
                y = int(y)
                if y not in dist:
                    dist[y] = d
                    if y == v:
                        return d
                    nxt.append(y)
        frontier = nxt
    return -1


def _induced_components(g: Graph, vs: set):
    seen = set()
    out = []
    for s in sorted(vs):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        head = 0
        while head < len(comp):
            v = comp[head]
            head += 1
            for u in g.neighbors(v):
                u = int(u)
                if u in vs and u not in seen:
                    seen.add(u)
                    comp.append(u)
        out.append(comp)
    return out


def _lex_shortest_path(g: Graph, u: int, v: int):
    """Shortest u-v path by hop count, lexicographically smallest."""
    dist = bfs_distances(g, [v])
    if dist[u] < 0:
        raise GraphError(f"{u} and {v} are not connected")
    path = [u]
    cur = u
    while cur != v:
        nxt = min(int(w) for w in g.neighbors(cur) if dist[w] == dist[cur] - 1)
        path.append(nxt)
        cur = nxt
    return path


def graph_to_dict(g: Graph) -> dict:
    d = {
        "vertices": list(range(g.n)),
        "edges": [[int(u), int(v)] for u, v in g.edges],
    }
    if g.faces is not None:
        d["faces"] = [list(f) for f in g.faces]
    return d


def graph_from_dict(d: dict) -> Graph:
    verts = d.get("vertices")
    if verts is None:
        raise GraphError("missing 'vertices'")
    if sorted(int(v) for v in verts) != list(range(len(verts))):
        raise GraphError("vertex ids must be dense 0..n-1")
    return Graph.build(len(verts), [(int(u), int(v)) for u, v in d.get("edges", [])],
                       faces=d.get("faces"))
