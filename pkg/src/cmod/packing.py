"""Circle packings of triangulations: radius iteration in the
hyperbolic disk, layout by face traversal, sphere packings via a
puncture vertex, Möbius normalization, and the derived roof tiles.

Radii are carried as the parameter a = exp(-2h) of the hyperbolic
radius h, which keeps the update well conditioned over the huge dynamic
range near the boundary (a = 0 is a horocycle)."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Cap,
    Circle,
    cap_from_circle,
    disk_automorphism,
    euclid_from_hyp,
    hyp_from_euclid,
    mobius_apply,
    mobius_circle,
    mobius_through_points,
)
from .graphs import Graph, GraphError, orient_faces, rotation_system, validate_triangulation
from .kernels import pack_residual, pack_sweeps

__all__ = [
    "DiskRadii",
    "Packing",
    "PackingError",
    "pack_disk",
    "layout",
    "pack_sphere",
    "mobius_normalize",
    "ring_lemma_audit",
    "sphere_balance",
    "Toiture",
    "build_toiture",
    "fibonacci_sphere",
]


class PackingError(RuntimeError):
    pass


@dataclass
class DiskRadii:
    """Radius state of a maximal disk packing: a[v] = exp(-2h_v),
    zero on the boundary (horocycles)."""

    a: np.ndarray
    interior: np.ndarray
    boundary: np.ndarray
    residual: float
    sweeps: int
    trace: np.ndarray

    def hyperbolic_radius(self, v: int) -> float:
        av = float(self.a[v])
        return math.inf if av <= 0 else -0.5 * math.log(av)


@dataclass
class Packing:
    """Laid-out circle configuration.  One circle per vertex; a circle
    with complement set is the disk outside it (used for the vertex sent
    to infinity in sphere packings)."""

    graph: Graph
    circles: list
    residual: float
    chart: str
    marked: tuple | None = None
    meta: dict = field(default_factory=dict)


def _flowers(g: Graph):
    oriented = orient_faces(g)
    rot, isb = rotation_system(g, oriented)
    return oriented, rot, isb


def _require_disk(g: Graph):
    rep = validate_triangulation(g)
    if not rep.valid:
        raise GraphError("not a triangulated disk: " + "; ".join(rep.reasons))
    oriented, rot, isb = _flowers(g)
    if not np.any(isb):
        raise GraphError("closed surface: disk packing needs a boundary")
    return oriented, rot, isb


def _newton_polish(a, interior, fptr, fdat, tol, max_iter=80):
    """Damped Newton on the interior angle-sum equations in log-radius
    variables.  Mutates ``a``; returns (residual, accepted residuals)."""
    import scipy.sparse as sp
    import scipy.sparse.linalg as spl

    m = interior.size
    pos = np.full(int(fdat.max(initial=int(interior.max())) + 1), -1,
                  dtype=np.int64)
    pos[interior] = np.arange(m)
    iv, uu, ww = [], [], []
    for i in range(m):
        fl = fdat[fptr[i]:fptr[i + 1]]
        k = fl.size
        for j in range(k):
            iv.append(i)
            uu.append(int(fl[j]))
            ww.append(int(fl[(j + 1) % k]))
    iv = np.array(iv, dtype=np.int64)
    uu = np.array(uu, dtype=np.int64)
    ww = np.array(ww, dtype=np.int64)
    pu, pw = pos[uu], pos[ww]

    def residuals(avec):
        av, au, aw = avec[interior][iv], avec[uu], avec[ww]
        den_u, den_w = 1.0 - av * au, 1.0 - av * aw
        s = av * (1.0 - au) * (1.0 - aw) / (den_u * den_w)
        s = np.clip(s, 1e-300, 1.0 - 1e-16)
        fvec = np.zeros(m)
        np.add.at(fvec, iv, 2.0 * np.arcsin(np.sqrt(s)))
        fvec -= 2.0 * math.pi
        return fvec, s, (av, au, aw, den_u, den_w)

    res = pack_residual(a, interior, fptr, fdat)
    accepted = []
    x = np.log(np.clip(a[interior], 1e-300, 1.0 - 1e-15))
    lo_x, hi_x = -690.0, math.log(1.0 - 1e-15)
    mu = 1e-4
    fvec, s, parts = residuals(a)
    fnorm = np.linalg.norm(fvec)
    # run to the floating-point floor of the residual norm: the layout
    # step amplifies coherent (low-mode) radius error, so stopping at
    # the max-residual target alone leaves avoidable position drift
    prev_fnorm = math.inf
    for _ in range(max_iter):
        if res < tol and fnorm > 0.999 * prev_fnorm:
            break
        prev_fnorm = fnorm
        av, au, aw, den_u, den_w = parts
        dal = 1.0 / np.sqrt(s * (1.0 - s))
        # partials of the corner angle in log-radius variables (the chain
        # rule puts one factor of the radius parameter on each column)
        gv = dal * s * (1.0 / av + au / den_u + aw / den_w) * av
        gu = dal * s * (av / den_u - 1.0 / (1.0 - au)) * au
        gw = dal * s * (av / den_w - 1.0 / (1.0 - aw)) * aw
        ok_u, ok_w = pu >= 0, pw >= 0
        rows = np.concatenate([iv, iv[ok_u], iv[ok_w]])
        cols = np.concatenate([iv, pu[ok_u], pw[ok_w]])
        vals = np.concatenate([gv, gu[ok_u], gw[ok_w]])
        J = sp.coo_matrix((vals, (rows, cols)), shape=(m, m)).tocsr()
        diag = np.maximum(np.abs(J.diagonal()), 1e-12)

        improved = False
        for _ in range(14):
            # diagonal damping tames the stiff rows near the boundary
            # (corner angles close to pi) without touching smooth ones
            Jmu = (J + sp.diags(mu * diag)).tocsc()
            try:
                dx = spl.splu(Jmu).solve(-fvec)
            except RuntimeError:
                dx = None
            if dx is None or not np.all(np.isfinite(dx)):
                mu = max(mu, 1e-8) * 10.0
                continue
            xt = np.clip(x + dx, lo_x, hi_x)
            at = a.copy()
            at[interior] = np.exp(xt)
            ft, st, pt = residuals(at)
            fn = np.linalg.norm(ft)
            if fn < fnorm:
                x = xt
                a[interior] = np.exp(xt)
                fvec, s, parts, fnorm = ft, st, pt, fn
                rt = pack_residual(a, interior, fptr, fdat)
                if rt < res:
                    res = rt
                    accepted.append(rt)
                mu = max(mu / 3.0, 1e-14)
                improved = True
                break
            mu = max(mu, 1e-8) * 10.0
        if not improved:
            break
    return res, accepted


def pack_disk(g: Graph, tol: float = 1e-10, max_sweeps: int = 100000,
              accel_every: int = 10) -> DiskRadii:
    """Maximal-packing radii for a triangulated disk: every interior
    angle sum is driven to 2*pi; boundary vertices are horocycles
    internally tangent to the unit circle.

    Gauss-Seidel sweeps do the bulk of the work; a sparse Newton polish
    finishes to tolerances the sweeps would need too many passes to
    reach on large complexes."""
    _, rot, isb = _require_disk(g)
    interior = np.array([v for v in range(g.n) if not isb[v]], dtype=np.int64)
    boundary = np.array([v for v in range(g.n) if isb[v]], dtype=np.int64)
    a = np.zeros(g.n, dtype=np.float64)
    if interior.size == 0:
        return DiskRadii(a, interior, boundary, 0.0, 0,
                         np.zeros(0, dtype=np.float64))
    a[interior] = 0.5
    fptr = np.zeros(interior.size + 1, dtype=np.int64)
    flat = []
    for j, v in enumerate(interior):
        flat.extend(rot[v])
        fptr[j + 1] = len(flat)
    fdat = np.array(flat, dtype=np.int64)
    warm_tol = max(tol, 1e-3)
    residual, sweeps, trace = pack_sweeps(a, interior, fptr, fdat,
                                          warm_tol, max_sweeps, accel_every)
    trace = list(np.asarray(trace))
    if residual > tol:
        residual, polished = _newton_polish(a, interior, fptr, fdat, tol)
        trace.extend(polished)
    if residual > tol:
        raise PackingError(
            f"radius iteration stalled at residual {residual:.3e} "
            f"after {sweeps} sweeps")
    return DiskRadii(a, interior, boundary, float(residual), int(sweeps),
                     np.asarray(trace, dtype=np.float64))


def _euclid_disk_radius(av: float) -> float:
    sa = math.sqrt(av)
    return (1.0 - sa) / (1.0 + sa)


def _pair_angle(ap: float, ax: float, ay: float) -> float:
    num = ap * (1.0 - ax) * (1.0 - ay)
    den = (1.0 - ap * ax) * (1.0 - ap * ay)
    s2 = min(1.0, max(0.0, num / den))
    return 2.0 * math.asin(math.sqrt(s2))


def _uhp_map(circ: Circle):
    """Map sending the horocycle's tangency point to infinity, so the
    horocycle becomes the horizontal line y = Y."""
    rho = abs(circ.center)
    if rho <= 0:
        raise PackingError("degenerate horocycle at the disk center")
    zeta = circ.center / rho
    T = np.array([[1j, 1j * zeta], [-1.0, zeta]], dtype=complex)
    Tinv = np.array([[zeta, -1j * zeta], [1.0, 1j]], dtype=complex)
    Y = (1.0 - circ.radius) / circ.radius
    return T, Tinv, Y


class _LayoutState:
    def __init__(self, g: Graph, radii: DiskRadii, rot, isb):
        self.g = g
        self.a = radii.a
        self.isb = isb
        self.circ: list = [None] * g.n
        self.hypc: list = [None] * g.n

    def placed(self, v) -> bool:
        return self.circ[v] is not None

    def place_root_pair(self, u: int, v: int):
        a = self.a
        if not self.isb[u]:
            ru = _euclid_disk_radius(a[u])
            self.hypc[u] = 0.0 + 0.0j
            self.circ[u] = Circle(0.0 + 0.0j, ru)
            if not self.isb[v]:
                s = math.sqrt(a[u] * a[v])
                d = (1.0 - s) / (1.0 + s)
                self.hypc[v] = complex(d, 0.0)
                hv = -0.5 * math.log(a[v])
                self.circ[v] = euclid_from_hyp(self.hypc[v], hv)
            else:
                self.circ[v] = Circle(complex((1.0 + ru) / 2.0, 0.0),
                                      (1.0 - ru) / 2.0)
        else:
            # all-boundary start: gauge the first horocycle at the point 1
            self.circ[u] = Circle(0.5 + 0.0j, 0.5)
            T, Tinv, Y = _uhp_map(self.circ[u])
            self._place_from_uhp(v, Tinv, Y, 0.0)

    def _place_from_uhp(self, w: int, Tinv, Y: float, x: float):
        aw = self.a[w]
        if not self.isb[w]:
            yc = Y * (1.0 + aw) / 2.0
            re = Y * (1.0 - aw) / 2.0
            cw = mobius_circle(Tinv, Circle(complex(x, yc), re))
            self.circ[w] = cw
            self.hypc[w] = hyp_from_euclid(cw)[0]
        else:
            rho = Y / 2.0
            self.circ[w] = mobius_circle(Tinv, Circle(complex(x, rho), rho))

    def place_third(self, u: int, v: int, w: int):
        """Place w of the oriented face (u, v, w); u and v already sit."""
        a = self.a
        if not self.isb[u] or not self.isb[v]:
            if self.isb[u]:
                # pivot at v: w precedes u in v's rotation
                pivot, ref, sign = v, u, -1.0
            else:
                pivot, ref, sign = u, v, +1.0
            zeta = self.hypc[pivot]
            M = disk_automorphism(zeta)
            Minv = np.array([[1.0, zeta], [np.conj(zeta), 1.0]], dtype=complex)
            if not self.isb[ref]:
                zr = mobius_apply(M, self.hypc[ref])
                theta_ref = math.atan2(zr.imag, zr.real)
            else:
                cr = mobius_circle(M, self.circ[ref])
                theta_ref = math.atan2(cr.center.imag, cr.center.real)
            alpha = _pair_angle(a[pivot], a[v if pivot == u else u], a[w])
            theta = theta_ref + sign * alpha
            rp = _euclid_disk_radius(a[pivot])
            if not self.isb[w]:
                s = math.sqrt(a[pivot] * a[w])
                d = (1.0 - s) / (1.0 + s)
                zw = d * complex(math.cos(theta), math.sin(theta))
                self.hypc[w] = mobius_apply(Minv, zw)
                hw = -0.5 * math.log(a[w])
                self.circ[w] = euclid_from_hyp(self.hypc[w], hw)
            else:
                cc = complex(math.cos(theta), math.sin(theta)) * (1.0 + rp) / 2.0
                self.circ[w] = mobius_circle(Minv, Circle(cc, (1.0 - rp) / 2.0))
        else:
            T, Tinv, Y = _uhp_map(self.circ[u])
            cv = mobius_circle(T, self.circ[v])
            xv, rv = cv.center.real, cv.radius
            aw = a[w]
            if not self.isb[w]:
                yc = Y * (1.0 + aw) / 2.0
                re = Y * (1.0 - aw) / 2.0
                gap = max(0.0, (re + rv) ** 2 - (yc - rv) ** 2)
            else:
                rho = Y / 2.0
                gap = max(0.0, (rho + rv) ** 2 - (rho - rv) ** 2)
            self._place_from_uhp(w, Tinv, Y, xv + math.sqrt(gap))


def tangency_residual(g: Graph, circles) -> float:
    """Max relative tangency error over the edges."""
    worst = 0.0
    for u, v in g.edges:
        cu, cv = circles[int(u)], circles[int(v)]
        if cu is None or cv is None:
            return math.inf
        if cu.complement or cv.complement:
            inner, outer = (cv, cu) if cu.complement else (cu, cv)
            gap = abs((outer.radius - abs(inner.center - outer.center))
                      - inner.radius)
            worst = max(worst, gap / inner.radius)
        else:
            gap = abs(abs(cu.center - cv.center) - (cu.radius + cv.radius))
            worst = max(worst, gap / (cu.radius + cv.radius))
    return worst


def layout(g: Graph, radii: DiskRadii, root_face: int | None = None) -> Packing:
    """Positions from radii by breadth-first face traversal in the unit
    disk.  Deterministic: the traversal starts at the lexicographically
    smallest face unless a face index is supplied."""
    oriented, rot, isb = _flowers(g)
    st = _LayoutState(g, radii, rot, isb)

    keyed = sorted(range(len(oriented)), key=lambda i: tuple(sorted(oriented[i])))
    edge_to_faces: dict = {}
    for i, f in enumerate(oriented):
        for j in range(3):
            e = (min(f[j], f[(j + 1) % 3]), max(f[j], f[(j + 1) % 3]))
            edge_to_faces.setdefault(e, []).append(i)

    if root_face is None:
        root = keyed[0]
    else:
        if not 0 <= root_face < len(oriented):
            raise ValueError("root_face index out of range")
        root = int(root_face)
    f = oriented[root]
    ints = [x for x in f if not isb[x]]
    if ints:
        u = min(ints)
        i = f.index(u)
    else:
        u = min(f)
        i = f.index(u)
    u, v, w = f[i], f[(i + 1) % 3], f[(i + 2) % 3]
    st.place_root_pair(u, v)
    st.place_third(u, v, w)

    seen = {root}
    queue = deque([root])
    while queue:
        fi = queue.popleft()
        f = oriented[fi]
        missing = [x for x in f if not st.placed(x)]
        if missing:
            if len(missing) > 1:
                raise PackingError("face traversal lost contact")
            w = missing[0]
            i = f.index(w)
            st.place_third(f[(i + 1) % 3], f[(i + 2) % 3], w)
        for j in range(3):
            e = (min(f[j], f[(j + 1) % 3]), max(f[j], f[(j + 1) % 3]))
            for ni in edge_to_faces[e]:
                if ni not in seen:
                    seen.add(ni)
                    queue.append(ni)
    if len(seen) != len(oriented):
        raise PackingError("face traversal did not reach every face")

    res = tangency_residual(g, st.circ)
    return Packing(graph=g, circles=list(st.circ), residual=res, chart="disk",
                   meta={"hyp_centers": st.hypc})


def pack_sphere(g: Graph, marked, tol: float = 1e-10,
                max_sweeps: int = 100000,
                root_face: int | None = None) -> Packing:
    """Circle packing of a closed sphere triangulation, normalized so the
    circles of the three marked vertices sit at 0, 1 and infinity (the
    third circle is the complement of a round disk)."""
    a1, a2, a3 = (int(x) for x in marked)
    if len({a1, a2, a3}) != 3:
        raise ValueError("marked vertices must be distinct")
    rep = validate_triangulation(g, require_closed=True)
    if not rep.valid:
        raise GraphError("not a sphere triangulation: " + "; ".join(rep.reasons))

    keep = [v for v in range(g.n) if v != a3]
    new_id = {v: i for i, v in enumerate(keep)}
    edges = [(new_id[int(u)], new_id[int(v)]) for u, v in g.edges
             if int(u) != a3 and int(v) != a3]
    faces = [tuple(new_id[x] for x in f) for f in g.faces if a3 not in f]
    punctured = Graph.build(g.n - 1, edges, faces=faces)

    radii = pack_disk(punctured, tol=tol, max_sweeps=max_sweeps)
    disk = layout(punctured, radii, root_face=root_face)

    circles = [None] * g.n
    for v in keep:
        circles[v] = disk.circles[new_id[v]]
    circles[a3] = Circle(0.0 + 0.0j, 1.0, complement=True)
    p = Packing(graph=g, circles=circles, residual=math.nan, chart="plane",
                marked=(a1, a2, a3))
    p = mobius_normalize(p, (a1, a2, a3))
    if p.residual > max(1e-8, 100 * tol):
        raise PackingError(f"normalized packing residual {p.residual:.3e}")
    return p


def _is_horocycle(c: Circle, tol: float = 1e-7) -> bool:
    return abs(c.center) + c.radius >= 1.0 - tol


def _axis_balance(rho: float, sigma: float) -> float:
    """Real parameter of the disk automorphism (z - a)/(1 - a z), which
    fixes -1 and 1, chosen so horocycles of radii rho at -1 and sigma
    at 1 map to horocycles of equal radius."""
    b = rho + sigma - 2.0 * rho * sigma
    disc = math.sqrt(max(rho * sigma * (1.0 - rho) * (1.0 - sigma), 0.0))
    den = b + 2.0 * disc
    if den <= 0.0:
        raise PackingError("degenerate horocycle pair in normalization")
    return (rho - sigma) / den


def _canonical_disk(circles: list, a1: int, a2: int) -> list:
    """Rigid-motion canonical form of a maximal disk packing with the
    complement circle left untouched: kills the automorphism freedom of
    the disk using the two marked circles."""
    c1, c2 = circles[a1], circles[a2]
    if not _is_horocycle(c1):
        zeta, _ = hyp_from_euclid(c1)
        M = disk_automorphism(zeta)
        circles = [mobius_circle(M, c) for c in circles]
    elif not _is_horocycle(c2):
        zeta, _ = hyp_from_euclid(c2)
        M = disk_automorphism(zeta)
        circles = [mobius_circle(M, c) for c in circles]
    else:
        # both marked circles touch the boundary: pin their tangency
        # points at -1 and 1, then translate along that axis until the
        # two euclidean radii agree
        t1 = c1.center / abs(c1.center)
        t2 = c2.center / abs(c2.center)
        span = np.angle(t2 / t1) % (2.0 * math.pi)
        if span < 1e-12:
            raise PackingError("marked horocycles share a tangency point")
        q = t1 * np.exp(0.5j * span)
        B = mobius_through_points((t1, q, t2), (-1.0, -1.0j, 1.0))
        circles = [mobius_circle(B, c) for c in circles]
        al = _axis_balance(circles[a1].radius, circles[a2].radius)
        Mb = np.array([[1.0, -al], [-al, 1.0]], dtype=complex)
        circles = [mobius_circle(Mb, c) for c in circles]

    g1, g2 = circles[a1].center, circles[a2].center
    if abs(g2 - g1) < 1e-13:
        raise PackingError("marked centers collapse under normalization")
    u = (g2 - g1) / abs(g2 - g1)
    R = np.array([[np.conj(u), 0.0], [0.0, 1.0]], dtype=complex)
    return [mobius_circle(R, c) for c in circles]


def mobius_normalize(p: Packing, marked, tol: float = 1e-9) -> Packing:
    """Möbius-normalize a packing so center(marked[0]) = 0,
    center(marked[1]) = 1 and marked[2] becomes the complement disk
    (its center is the point at infinity).  The normal form depends only
    on the Möbius class of the input, so layouts produced from different
    traversal roots normalize to the same circles.  Idempotent."""
    a1, a2, a3 = (int(x) for x in marked)
    circles = list(p.circles)
    c3 = circles[a3]
    # send the third disk to the complement of the unit circle
    if c3.complement:
        T = np.array([[1.0, -c3.center], [0.0, c3.radius]], dtype=complex)
    else:
        T = np.array([[0.0, c3.radius], [1.0, -c3.center]], dtype=complex)
    circles = [mobius_circle(T, c) for c in circles]
    if circles[a1].complement or circles[a2].complement:
        raise PackingError("marked circles overlap the infinite disk")

    # the leftover freedom is the automorphism group of the disk; fix a
    # canonical representative, then pass to the plane chart by an
    # affine map (affine maps move euclidean centers exactly)
    circles = _canonical_disk(circles, a1, a2)

    S = np.array([[1.0, -circles[a1].center], [0.0, 1.0]], dtype=complex)
    circles = [mobius_circle(S, c) for c in circles]

    z2 = circles[a2].center
    if abs(z2) < tol * max(1.0, circles[a2].radius):
        raise PackingError("marked centers collapse under normalization")
    D = np.array([[1.0 / z2, 0.0], [0.0, 1.0]], dtype=complex)
    circles = [mobius_circle(D, c) for c in circles]

    res = tangency_residual(p.graph, circles)
    return Packing(graph=p.graph, circles=circles, residual=res,
                   chart="plane", marked=(a1, a2, a3), meta=dict(p.meta))


def ring_lemma_audit(p: Packing, max_degree: int) -> dict:
    """Minimum neighbor-to-center radius ratio per interior degree
    class: an empirical version of the bounded-ratio law for interior
    circles."""
    _, rot, isb = _flowers(p.graph)
    out: dict[int, float] = {}
    for v in range(p.graph.n):
        if isb[v]:
            continue
        d = p.graph.degree(v)
        if d > max_degree:
            continue
        cv = p.circles[v]
        if cv is None or cv.complement:
            continue
        ratios = []
        for u in p.graph.neighbors(v):
            cu = p.circles[int(u)]
            if cu.complement:
                continue
            ratios.append(cu.radius / cv.radius)
        if not ratios:
            continue
        m = min(ratios)
        out[d] = min(out.get(d, math.inf), m)
    return out


def _rotation_to_north(u) -> np.ndarray:
    """Fractional-linear matrix of the sphere rotation carrying unit
    vector u to the north pole, in the chart where 0 is the south pole."""
    x, y, z = (float(t) for t in u)
    phi = math.atan2(y, x)
    theta = math.acos(min(1.0, max(-1.0, z)))
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    tilt = np.array([[c, s], [-s, c]], dtype=complex)
    spin = np.array([[np.exp(-0.5j * phi), 0.0], [0.0, np.exp(0.5j * phi)]])
    return tilt @ spin


def sphere_balance(p: Packing, tol: float = 1e-10, max_iter: int = 200) -> Packing:
    """Recenter a sphere packing so the spherical cap centers average to
    the origin.  Iterates conformal boosts: rotate the mean cap axis to
    the north pole, contract the plane toward 0 (the south pole), rotate
    back.  The balanced configuration is the natural representative for
    size statistics on the sphere; it is unique up to rotation."""
    if p.chart != "plane":
        raise ValueError("balance needs a sphere packing in the plane chart")
    circles = list(p.circles)
    gap = math.inf
    for _ in range(max_iter):
        axes = np.array([cap_from_circle(c).axis for c in circles])
        m = axes.mean(axis=0)
        gap = float(np.linalg.norm(m))
        if gap < tol:
            res = tangency_residual(p.graph, circles)
            meta = dict(p.meta)
            meta["balanced"] = True
            return Packing(graph=p.graph, circles=circles, residual=res,
                           chart="plane", marked=p.marked, meta=meta)
        rot = _rotation_to_north(m / gap)
        rinv = np.array([[rot[1, 1], -rot[0, 1]], [-rot[1, 0], rot[0, 0]]])
        lam = math.sqrt((1.0 - gap) / (1.0 + gap))
        for _ in range(10):
            boost = rinv @ np.diag([lam, 1.0]).astype(complex) @ rot
            trial = [mobius_circle(boost, c) for c in circles]
            taxes = np.array([cap_from_circle(c).axis for c in trial])
            if np.linalg.norm(taxes.mean(axis=0)) < gap:
                circles = trial
                break
            lam = math.sqrt(lam)
        else:
            raise PackingError("cap balancing stalled at gap %.3e" % gap)
    raise PackingError("cap balancing did not converge (gap %.3e)" % gap)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic quasi-uniform point set on the unit sphere."""
    i = np.arange(n, dtype=np.float64)
    phi = math.pi * (3.0 - math.sqrt(5.0))
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    t = phi * i
    return np.stack([r * np.cos(t), r * np.sin(t), z], axis=1)


@dataclass
class Toiture:
    """Roof tiles over a sphere packing: each sample point of the sphere
    is assigned to the nearest cap, and tile roundness is the largest
    sample distance over the cap radius."""

    caps: list
    assignment: np.ndarray
    roundness: np.ndarray
    max_roundness: float
    samples: int


def build_toiture(p: Packing, samples: int = 8000, balance: bool = True) -> Toiture:
    """Tile the sphere by nearest-cap regions.  By default the packing is
    first recentered with sphere_balance, since tile roundness is only
    meaningful in the balanced representative."""
    if p.chart != "plane":
        raise ValueError("toiture needs a sphere packing in the plane chart")
    if balance:
        p = sphere_balance(p)
    caps = [cap_from_circle(c) for c in p.circles]
    pts = fibonacci_sphere(samples)
    axes = np.stack([c.axis for c in caps])
    thetas = np.array([c.theta for c in caps])
    ang = np.arccos(np.clip(pts @ axes.T, -1.0, 1.0))
    dist = np.maximum(0.0, ang - thetas[None, :])
    assign = np.argmin(dist, axis=1)
    rnd = np.zeros(len(caps))
    for j in range(len(caps)):
        mine = ang[assign == j, j]
        if mine.size:
            rnd[j] = float(np.max(mine)) / max(thetas[j], 1e-12)
    return Toiture(caps=caps, assignment=assign, roundness=rnd,
                   max_roundness=float(np.max(rnd)), samples=samples)
