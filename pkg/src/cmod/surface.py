"""Annulus and quadrilateral moduli on planar complexes.

An annulus here is a connected polygonal complex whose boundary splits
into exactly two cycles.  Two moduli describe it: the reciprocal of the
modulus of the curves joining the boundaries (sup), and the modulus of
the cycles separating them (inf).  Separating cycles are searched by
cutting the annulus along a shortest boundary-to-boundary path and
joining the two copies of each cut vertex; the cut path is recomputed
for the metric at hand, which is what makes the search exact (a minimum
separating cycle can be rerouted along a shortest cut path without
getting longer, so some minimum cycle crosses it exactly once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import (
    Condenser,
    Curve,
    CurveFamily,
    Graph,
    GraphError,
    orient_faces,
    rotation_system,
)
from .kernels import dijkstra_vertex
from .modulus import (
    ModulusResult,
    SolverOptions,
    modulus,
    _as_rho,
    _lex_walk,
)

__all__ = [
    "AnnulusError",
    "AnnulusSpec",
    "QuadrilateralSpec",
    "build_annulus",
    "boundary_cycles",
    "separating_family",
    "joining_family",
    "shortest_separating_cycle",
    "violated_separating_cycles",
    "cycle_separates",
    "mod_sup",
    "mod_inf",
    "infsup_audit",
    "quad_moduli",
    "toiture_modulus_compare",
]

_NOHOP = np.int64(np.iinfo(np.int64).max)


class AnnulusError(ValueError):
    """The complex is not an annulus with the declared boundaries."""


@dataclass(frozen=True)
class AnnulusSpec:
    """Planar annulus: host complex plus its two boundary vertex cycles."""

    host: Graph
    inner: tuple[int, ...]
    outer: tuple[int, ...]
    rotations: tuple
    is_boundary: tuple


def boundary_cycles(g: Graph, oriented) -> list[list[int]]:
    """Vertex cycles of the boundary (edges lying in exactly one face)."""
    count = {}
    for f in oriented:
        k = len(f)
        for i in range(k):
            e = (min(f[i], f[(i + 1) % k]), max(f[i], f[(i + 1) % k]))
            count[e] = count.get(e, 0) + 1
    adj: dict[int, list[int]] = {}
    for (u, v), c in count.items():
        if c == 1:
            adj.setdefault(u, []).append(v)
            adj.setdefault(v, []).append(u)
    for v, nb in adj.items():
        if len(nb) != 2:
            raise AnnulusError(f"boundary vertex {v} has {len(nb)} boundary edges")
    cycles = []
    seen = set()
    for s in sorted(adj):
        if s in seen:
            continue
        cyc = [s]
        seen.add(s)
        prev, cur = None, s
        while True:
            a, b = adj[cur]
            nxt = b if a == prev else a
            if nxt == s:
                break
            cyc.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        cycles.append(cyc)
    return cycles


def build_annulus(host: Graph, inner=None, outer=None) -> AnnulusSpec:
    """Validate an annulus complex.  The two boundary cycles are detected
    from the faces; inner/outer, when given, must name them exactly (this
    pins down which hole is which)."""
    if host.faces is None or len(host.faces) == 0:
        raise AnnulusError("annulus needs declared faces")
    euler = host.n - host.m + len(host.faces)
    if euler != 0:
        raise AnnulusError(f"Euler characteristic {euler}, an annulus has 0")
    try:
        oriented = orient_faces(host)
        rot, isb = rotation_system(host, oriented)
    except GraphError as exc:
        raise AnnulusError(str(exc))
    cycles = boundary_cycles(host, oriented)
    if len(cycles) != 2:
        raise AnnulusError(f"found {len(cycles)} boundary cycles, an annulus has 2")
    sets = [frozenset(c) for c in cycles]
    if inner is None and outer is None:
        order = sorted(range(2), key=lambda i: min(sets[i]))
        inner = tuple(sorted(sets[order[0]]))
        outer = tuple(sorted(sets[order[1]]))
    else:
        si, so = frozenset(inner or ()), frozenset(outer or ())
        if {si, so} != set(sets):
            raise AnnulusError(
                "inner/outer must be exactly the two boundary cycles "
                f"(sizes {sorted(len(s) for s in sets)})")
        inner, outer = tuple(sorted(si)), tuple(sorted(so))
    return AnnulusSpec(host=host, inner=inner, outer=outer,
                       rotations=tuple(tuple(r) for r in rot),
                       is_boundary=tuple(bool(b) for b in isb))


def joining_family(ann: AnnulusSpec) -> CurveFamily:
    return CurveFamily.connect(ann.inner, ann.outer)


def separating_family(ann: AnnulusSpec) -> CurveFamily:
    return CurveFamily(kind="separate",
                       condenser=Condenser(ann.inner, ann.outer),
                       annulus=ann)


def cycle_separates(g: Graph, cycle, E, F) -> bool:
    """Ground truth: no path from E to F avoids the cycle's vertices."""
    banned = set(cycle)
    seen = set()
    stack = [v for v in E if v not in banned]
    seen.update(stack)
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            u = int(u)
            if u not in banned and u not in seen:
                seen.add(u)
                stack.append(u)
    return not (set(F) - banned) & seen


# ------------------------------------------------------ cut machinery


def _cut_path(ann: AnnulusSpec, rho: np.ndarray) -> list[int]:
    """Shortest inner-to-outer path for the given metric, ties broken by
    hops then vertex ids.  Such a path meets each boundary only at its
    own endpoint, which keeps the cut a genuine cross-cut."""
    g = ann.host
    src = np.asarray(ann.outer, dtype=np.int64)
    dist, hops = dijkstra_vertex(g.indptr, g.nbrs, rho, src, np.int64(-1))
    best = None
    for u in ann.inner:
        key = (float(dist[u]), int(hops[u]), u)
        if best is None or key < best:
            best = key
    path = _lex_walk(g, rho, dist, hops, best[2])
    inner_set, outer_set = set(ann.inner), set(ann.outer)
    for v in path[1:]:
        if v in inner_set:
            raise AnnulusError("cut path touched the inner boundary twice")
    for v in path[:-1]:
        if v in outer_set:
            raise AnnulusError("cut path touched the outer boundary early")
    return path


def _split_sides(ann: AnnulusSpec, path) -> list[dict[int, int]]:
    """For each cut vertex, map each non-path-edge neighbor to a side:
    +1 left of the directed cut, -1 right.

    Interior vertices split their rotation cycle at the two path
    neighbors; endpoint fans are split at the single path neighbor, the
    boundary gap standing in for the path's continuation into the hole.
    """
    k = len(path) - 1
    sides = []
    for i, v in enumerate(path):
        rot = list(ann.rotations[v])
        if 0 < i < k:
            if ann.is_boundary[v]:
                raise AnnulusError("cut path touched a boundary between its ends")
            a = rot.index(path[i + 1])
            b = rot.index(path[i - 1])
            order = rot[a:] + rot[:a]
            j = order.index(path[i - 1])
            m = {}
            for t, u in enumerate(order):
                if t == 0 or t == j:
                    continue
                m[u] = 1 if t < j else -1
        elif i == 0:
            j = rot.index(path[1])
            m = {}
            for t, u in enumerate(rot):
                if t == j:
                    continue
                m[u] = 1 if t > j else -1
        else:
            j = rot.index(path[k - 1])
            m = {}
            for t, u in enumerate(rot):
                if t == j:
                    continue
                m[u] = 1 if t < j else -1
        sides.append(m)
    return sides


@dataclass
class _CutGraph:
    graph: Graph
    rho: np.ndarray
    path: list
    left_id: list
    right_id: list


def _build_cut(ann: AnnulusSpec, rho: np.ndarray) -> _CutGraph:
    g = ann.host
    path = _cut_path(ann, rho)
    sides = _split_sides(ann, path)
    n = g.n
    k = len(path)
    path_arr = np.asarray(path, dtype=np.int64)
    lab = np.full(n, -1, dtype=np.int64)
    lab[path_arr] = np.arange(k)

    E = g.edges
    iu = lab[E[:, 0]]
    iv = lab[E[:, 1]]
    both_off = (iu < 0) & (iv < 0)
    both_on = (iu >= 0) & (iv >= 0)
    parts = [E[both_off]]
    on = np.nonzero(both_on)[0]
    adj = on[np.abs(iu[on] - iv[on]) == 1]
    if adj.size:
        parts.append(E[adj])
        parts.append(np.stack([n + iu[adj], n + iv[adj]], axis=1))
    extra = []
    for t in on[np.abs(iu[on] - iv[on]) != 1]:
        # chord between cut vertices; both rotations must agree
        u, v = int(E[t, 0]), int(E[t, 1])
        pu, pv = int(iu[t]), int(iv[t])
        su = sides[pu][v]
        sv = sides[pv][u]
        if su != sv:
            raise AnnulusError("cut sides disagree on a chord")
        extra.append((u, v) if su > 0 else (n + pu, n + pv))
    for t in np.nonzero(~both_off & ~both_on)[0]:
        u, v = int(E[t, 0]), int(E[t, 1])
        i, w = (int(iu[t]), v) if iu[t] >= 0 else (int(iv[t]), u)
        extra.append((path[i], w) if sides[i][w] > 0 else (n + i, w))
    if extra:
        parts.append(np.asarray(extra, dtype=np.int64))
    cut_g = _raw_graph(n + k, np.concatenate(parts, axis=0))
    rho_cut = np.concatenate([rho, rho[path_arr]])
    return _CutGraph(graph=cut_g, rho=rho_cut, path=path,
                     left_id=list(path), right_id=[n + i for i in range(k)])


def _raw_graph(n: int, e: np.ndarray) -> Graph:
    """Adjacency-only graph for internal shortest-path work.  Skips the
    validation done by Graph.build; callers guarantee a simple edge list."""
    lo = np.minimum(e[:, 0], e[:, 1])
    hi = np.maximum(e[:, 0], e[:, 1])
    e = np.stack([lo, hi], axis=1)
    both = np.concatenate([e, e[:, ::-1]], axis=0)
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(both[:, 0], minlength=n), out=indptr[1:])
    return Graph(n=n, edges=e, indptr=indptr, nbrs=both[:, 1].copy())


def _simplify_closed_walk(ann: AnnulusSpec, walk: list[int]) -> list[int]:
    """Remove revisits from a closed walk, keeping the part that still
    separates the boundaries.  Revisits only arise through zero-weight
    detours, so the kept cycle is never longer."""
    while True:
        first = {}
        rep = None
        for t, v in enumerate(walk):
            if v in first:
                rep = (first[v], t)
                break
            first[v] = t
        if rep is None:
            return walk
        a, b = rep
        inner_part = walk[a:b]
        outer_part = walk[:a] + walk[b:]
        if len(inner_part) >= 2 and cycle_separates(ann.host, inner_part,
                                                    ann.inner, ann.outer):
            walk = inner_part
        else:
            walk = outer_part


def _canonical_cycle(vs: list[int]) -> Curve:
    return Curve(Curve(tuple(vs), closed=True).key(), closed=True)


def _crossing_candidates(cut, rho):
    """Cycle candidates per cut-path crossing, ordered by (length, hops,
    crossing index)."""
    g = cut.graph
    cands = []
    for i in range(len(cut.path)):
        src = np.asarray([cut.right_id[i]], dtype=np.int64)
        dist, hops = dijkstra_vertex(g.indptr, g.nbrs, cut.rho, src,
                                     np.int64(cut.left_id[i]))
        L = cut.left_id[i]
        if not math.isfinite(dist[L]):
            continue
        length = float(dist[L]) - rho[cut.path[i]]
        cands.append((length, int(hops[L]) - 1, i))
    cands.sort()
    return cands


def _cycle_at_crossing(ann: AnnulusSpec, cut, rho, i: int) -> Curve:
    g = cut.graph
    src = np.asarray([cut.right_id[i]], dtype=np.int64)
    dist, hops = dijkstra_vertex(g.indptr, g.nbrs, cut.rho, src, np.int64(-1))
    lifted = _lex_walk(g, cut.rho, dist, hops, cut.left_id[i])
    host_walk = [v if v < ann.host.n else cut.path[v - ann.host.n] for v in lifted]
    host_walk = host_walk[:-1]
    host_walk = _simplify_closed_walk(ann, host_walk)
    return _canonical_cycle(host_walk)


def separating_oracle(ann: AnnulusSpec, rho, threshold: float,
                      limit: int) -> tuple[float, Curve, list[Curve]]:
    """Shortest separating cycle plus up to ``limit`` distinct cycles
    shorter than the threshold, cheapest crossings first, all from a
    single cut and crossing scan."""
    rho = _as_rho(ann.host, rho)
    cut = _build_cut(ann, rho)
    cands = _crossing_candidates(cut, rho)
    if not cands:
        raise AnnulusError("no separating cycle found")
    first = _cycle_at_crossing(ann, cut, rho, cands[0][2])
    ell = float(sum(rho[v] for v in first.vertices))
    out: list[Curve] = []
    seen = set()
    for length, _, i in cands:
        if length >= threshold or len(out) >= limit:
            break
        curve = first if i == cands[0][2] else _cycle_at_crossing(ann, cut,
                                                                  rho, i)
        if curve.key() in seen:
            continue
        seen.add(curve.key())
        out.append(curve)
    return ell, first, out


def shortest_separating_cycle(ann: AnnulusSpec, rho) -> tuple[float, Curve]:
    """Minimum-weight cycle separating the two boundaries, with its
    length.  Ties break by fewer vertices, then the canonical vertex
    sequence."""
    ell, curve, _ = separating_oracle(ann, rho, -math.inf, 0)
    return ell, curve


def violated_separating_cycles(ann: AnnulusSpec, rho, threshold: float,
                               limit: int) -> list[Curve]:
    """Distinct separating cycles shorter than the threshold, cheapest
    crossings first, up to limit of them.  One cycle per cut crossing, so
    the cost stays a bounded number of shortest-path runs."""
    return separating_oracle(ann, rho, threshold, limit)[2]


def tight_separating_cycles(ann: AnnulusSpec, rho, tol: float, cap: int):
    """Separating cycles within a (1+tol) factor of the shortest, up to
    cap of them.  Used by extremality certification."""
    rho = _as_rho(ann.host, rho)
    ell, _ = shortest_separating_cycle(ann, rho)
    cut = _build_cut(ann, rho)
    g = cut.graph
    out = {}
    truncated = False
    for i in range(len(cut.path)):
        limit = ell * (1.0 + tol) + rho[cut.path[i]]
        src = np.asarray([cut.right_id[i]], dtype=np.int64)
        dist, _ = dijkstra_vertex(g.indptr, g.nbrs, cut.rho, src, np.int64(-1))
        start = cut.left_id[i]
        if dist[start] > limit + 1e-12:
            continue
        stack = [(start, [start], float(cut.rho[start]))]
        while stack:
            v, pathv, cost = stack.pop()
            if v == cut.right_id[i]:
                host_walk = [x if x < ann.host.n else cut.path[x - ann.host.n]
                             for x in pathv][:-1]
                host_walk = _simplify_closed_walk(ann, host_walk)
                c = _canonical_cycle(host_walk)
                if cycle_separates(ann.host, c.vertices, ann.inner, ann.outer):
                    out[c.key()] = c
                if len(out) > cap:
                    truncated = True
                    stack = []
                continue
            for w in sorted(int(x) for x in g.neighbors(v)):
                if w in pathv:
                    continue
                nc = cost + float(cut.rho[w])
                if nc + float(dist[w]) - float(cut.rho[w]) <= limit + 1e-12:
                    stack.append((w, pathv + [w], nc))
        if truncated:
            break
    return list(out.values()), truncated


# ------------------------------------------------------------- moduli


@dataclass
class AnnulusModulus:
    """Value of an annulus modulus plus the certificate behind it.  For
    the sup flavor the value is the reciprocal of the joining modulus."""

    value: float
    result: ModulusResult
    flavor: str


def mod_sup(ann: AnnulusSpec, q: float = 2.0,
            opts: SolverOptions | None = None) -> AnnulusModulus:
    res = modulus(ann.host, joining_family(ann), Q=q, opts=opts)
    return AnnulusModulus(value=1.0 / res.modulus, result=res, flavor="sup")


def mod_inf(ann: AnnulusSpec, q: float = 2.0,
            opts: SolverOptions | None = None) -> AnnulusModulus:
    res = modulus(ann.host, separating_family(ann), Q=q, opts=opts)
    return AnnulusModulus(value=res.modulus, result=res, flavor="inf")


@dataclass
class InequalityReport:
    mod_inf: float
    mod_sup: float
    ok: bool
    margin: float
    inf_result: ModulusResult
    sup_result: ModulusResult


def infsup_audit(ann: AnnulusSpec, opts: SolverOptions | None = None) -> InequalityReport:
    """The separating modulus never exceeds the reciprocal of the joining
    modulus.  Computes both with certificates and checks."""
    opts = opts or SolverOptions()
    lo = mod_inf(ann, opts=opts)
    hi = mod_sup(ann, opts=opts)
    tol = 2.0 * max(opts.sep_tol, opts.cert_tol)
    return InequalityReport(
        mod_inf=lo.value, mod_sup=hi.value,
        ok=lo.value <= hi.value + tol * max(1.0, hi.value),
        margin=hi.value - lo.value,
        inf_result=lo.result, sup_result=hi.result)


@dataclass(frozen=True)
class QuadrilateralSpec:
    """Host graph with four marked boundary arcs in cyclic order."""

    host: Graph
    c1: tuple[int, ...]
    c2: tuple[int, ...]
    c3: tuple[int, ...]
    c4: tuple[int, ...]

    def __post_init__(self):
        arcs = [self.c1, self.c2, self.c3, self.c4]
        if any(len(a) == 0 for a in arcs):
            raise GraphError("quadrilateral sides must be nonempty")
        # adjacent sides may share corners; opposite sides may not touch
        if set(self.c1) & set(self.c3) or set(self.c2) & set(self.c4):
            raise GraphError("opposite quadrilateral sides must be disjoint")


@dataclass
class QuadReport:
    mod_13: ModulusResult
    mod_24: ModulusResult
    product: float


def quad_moduli(qd: QuadrilateralSpec, opts: SolverOptions | None = None) -> QuadReport:
    """Moduli of the two crossing directions and their product (which is
    exactly 1 on rectangular grids and near 1 for fine meshes)."""
    m13 = modulus(qd.host, CurveFamily.connect(qd.c1, qd.c3), opts=opts)
    m24 = modulus(qd.host, CurveFamily.connect(qd.c2, qd.c4), opts=opts)
    return QuadReport(mod_13=m13, mod_24=m24,
                      product=m13.modulus * m24.modulus)


def toiture_modulus_compare(nerve_graph: Graph, pieces_E, pieces_F,
                            curves, K: float, q: float = 2.0,
                            opts: SolverOptions | None = None):
    """Compare the nerve condenser modulus with the modulus of a supplied
    curve family on the same nerve.

    The supplied curves stand for discretized geometric curves joining
    the condenser plates.  Both moduli live on the nerve; when the
    covering is a roof of valence at most K, the condenser modulus stays
    within (K+1)^q of the curve-family modulus.
    """
    from .modulus import ComparisonReport

    deg = max(nerve_graph.degree(v) for v in range(nerve_graph.n))
    if deg > K:
        raise ValueError(f"nerve degree {deg} exceeds the declared valence {K}")
    fam_curves = CurveFamily.explicit([c if isinstance(c, Curve) else Curve(tuple(c))
                                       for c in curves])
    for c in fam_curves.curves:
        c.validate(nerve_graph)
    m_hat = modulus(nerve_graph, CurveFamily.connect(pieces_E, pieces_F),
                    Q=q, opts=opts)
    m_cur = modulus(nerve_graph, fam_curves, Q=q, opts=opts)
    C = (float(K) + 1.0) ** q
    return ComparisonReport(
        modulus_1=m_hat.modulus, modulus_2=m_cur.modulus, constant=C,
        upper_ok=m_hat.modulus <= C * m_cur.modulus * (1 + 1e-9) + 1e-12,
        lower_ok=m_cur.modulus <= C * m_hat.modulus * (1 + 1e-9) + 1e-12,
        detail=f"K={K}",
    )
