"""Discrete Riemann mapping by hexagonal circle packing.

A polygonal domain is triangulated by the equilateral lattice of mesh r,
the triangulated component through a base point is packed into the unit
disk, and vertices map to their circle centers.  The module also carries
the closed-form annulus modulus, audits comparing packed-annulus moduli
against it, and a dyadic test-metric bound for point-separation moduli.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import disk_automorphism, mobius_circle
from .graphs import Covering, CurveFamily, Graph, GraphError, nerve, validate_triangulation
from .modulus import ModulusResult, SolverOptions, modulus_condenser, q_volume, shortest_curve
from .packing import PackingError, layout, pack_disk
from .surface import AnnulusError, build_annulus, mod_inf, mod_sup

__all__ = [
    "HexDomain",
    "DiscreteMap",
    "ScanRow",
    "ScanTable",
    "DiskCovering",
    "ComparisonReport",
    "UpperBoundReport",
    "disk_polygon",
    "point_in_polygon",
    "boundary_distance",
    "hex_triangulate",
    "discrete_riemann_map",
    "rodin_sullivan_scan",
    "analytic_annulus_modulus",
    "analytic_rectangle_modulus",
    "packed_annulus_audit",
    "hex_disk_covering",
    "dyadic_ring_covering",
    "annulus_upper_bound_audit",
    "hausdorff_distance",
]

_SQ3 = math.sqrt(3.0)


# ------------------------------------------------------------ polygons


def _poly_array(domain) -> np.ndarray:
    poly = np.asarray(domain, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise ValueError("domain must be a polygon given as an (k, 2) array, k >= 3")
    area2 = float(np.sum(poly[:, 0] * np.roll(poly[:, 1], -1)
                         - np.roll(poly[:, 0], -1) * poly[:, 1]))
    if abs(area2) < 1e-30:
        raise ValueError("degenerate polygon")
    if area2 < 0.0:
        poly = poly[::-1].copy()
    return poly


def disk_polygon(center=0.0 + 0.0j, radius: float = 1.0, sides: int = 720) -> np.ndarray:
    """Regular polygon approximating a round disk boundary."""
    if radius <= 0 or sides < 3:
        raise ValueError("radius must be positive and sides >= 3")
    ang = 2.0 * math.pi * np.arange(sides) / sides
    c = complex(center)
    return np.stack([c.real + radius * np.cos(ang),
                     c.imag + radius * np.sin(ang)], axis=1)


def point_in_polygon(points, poly) -> np.ndarray:
    """Crossing-number containment test, vectorized over points."""
    poly = _poly_array(poly)
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    x1, y1 = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    for k in range(len(poly)):
        cond = (y1[k] > y) != (y2[k] > y)
        if not np.any(cond):
            continue
        t = (y[cond] - y1[k]) / (y2[k] - y1[k])
        cross = x1[k] + t * (x2[k] - x1[k])
        flip = np.zeros(len(pts), dtype=bool)
        flip[cond] = x[cond] < cross
        inside ^= flip
    return bool(inside[0]) if single else inside


def boundary_distance(z: complex, poly) -> float:
    """Distance from a point to the polygon boundary."""
    poly = _poly_array(poly)
    p = np.array([complex(z).real, complex(z).imag])
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    ap = p[None, :] - a
    denom = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    t = np.clip(np.sum(ap * ab, axis=1) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.linalg.norm(p[None, :] - proj, axis=1)))


# ------------------------------------------------- lattice triangulation


def _lattice_point(i, j, r):
    return r * (np.asarray(i, dtype=np.float64) + 0.5 * np.asarray(j, dtype=np.float64)) \
        + 1j * (r * 0.5 * _SQ3) * np.asarray(j, dtype=np.float64)


def _tri_corners(i: int, j: int, up: bool):
    if up:
        return ((i, j), (i + 1, j), (i, j + 1))
    return ((i + 1, j), (i + 1, j + 1), (i, j + 1))


def _cells_near(z: complex, r: float):
    """Candidate lattice triangles around a point, robust to points on
    cell boundaries."""
    jf = z.imag / (r * 0.5 * _SQ3)
    iff = z.real / r - 0.5 * jf
    i0, j0 = math.floor(iff), math.floor(jf)
    fi, fj = iff - i0, jf - j0
    first = [(i0, j0, fi + fj <= 1.0), (i0, j0, fi + fj > 1.0)]
    for i, j, up in first:
        yield i, j, bool(up)
    for dj in (0, -1, 1):
        for di in (0, -1, 1):
            for up in (True, False):
                cand = (i0 + di, j0 + dj, up)
                if (cand[0], cand[1], cand[2]) not in ((i0, j0, first[0][2]),
                                                       (i0, j0, first[1][2])):
                    yield cand


@dataclass
class HexDomain:
    """Equilateral-lattice triangulation of the part of a polygon reachable
    from z1 through whole interior triangles."""

    polygon: np.ndarray
    r: float
    z1: complex
    z2: complex
    graph: Graph
    coords: np.ndarray
    lattice_index: dict
    tri_index: dict
    inradius: float

    def locate(self, z: complex):
        """Face containing z and its barycentric weights, or None."""
        z = complex(z)
        for i, j, up in _cells_near(z, self.r):
            face = self.tri_index.get((i, j, bool(up)))
            if face is None:
                continue
            vs = self.graph.faces[face]
            a, b, c = (self.coords[v] for v in vs)
            det = (b.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (b.imag - a.imag)
            l2 = ((z.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (z.imag - a.imag)) / det
            l3 = ((b.real - a.real) * (z.imag - a.imag) - (z.real - a.real) * (b.imag - a.imag)) / det
            l1 = 1.0 - l2 - l3
            if min(l1, l2, l3) >= -1e-9:
                return face, np.array([l1, l2, l3])
        return None

    def interpolate(self, z: complex, values: np.ndarray):
        hit = self.locate(z)
        if hit is None:
            return None
        face, lam = hit
        vs = self.graph.faces[face]
        return complex(lam[0] * values[vs[0]] + lam[1] * values[vs[1]] + lam[2] * values[vs[2]])


def hex_triangulate(domain, r: float, z1: complex, z2: complex) -> HexDomain:
    """Component of whole-triangle lattice cells inside the polygon that
    contains z1.  Mesh too coarse to reach z1 or z2 is rejected."""
    poly = _poly_array(domain)
    if r <= 0:
        raise ValueError("mesh parameter must be positive")
    z1, z2 = complex(z1), complex(z2)
    if z1 == z2:
        raise ValueError("base points must be distinct")
    for z, name in ((z1, "z1"), (z2, "z2")):
        if not point_in_polygon(np.array([z.real, z.imag]), poly):
            raise ValueError(f"{name} must lie inside the domain")

    h = r * 0.5 * _SQ3
    ymin, ymax = poly[:, 1].min(), poly[:, 1].max()
    xmin, xmax = poly[:, 0].min(), poly[:, 0].max()
    j_lo, j_hi = math.floor(ymin / h) - 1, math.ceil(ymax / h) + 1
    tris = []
    for j in range(j_lo, j_hi + 1):
        i_lo = math.floor(xmin / r - 0.5 * j) - 1
        i_hi = math.ceil(xmax / r - 0.5 * j) + 1
        for i in range(i_lo, i_hi + 1):
            tris.append((i, j, True))
            tris.append((i, j, False))

    # keep triangles whose corners, edge midpoints, and centroid are inside
    corners = np.array([[_lattice_point(*c, r) for c in _tri_corners(i, j, up)]
                        for i, j, up in tris])
    probes = np.concatenate([
        corners,
        0.5 * (corners + np.roll(corners, -1, axis=1)),
        corners.mean(axis=1, keepdims=True),
    ], axis=1)
    flat = probes.reshape(-1)
    ok = point_in_polygon(np.stack([flat.real, flat.imag], axis=1), poly)
    keep_mask = ok.reshape(probes.shape).all(axis=1)
    kept = {t for t, k in zip(tris, keep_mask) if k}
    if not kept:
        raise ValueError("r too large: no lattice triangle fits inside the domain")

    # breadth-first component through shared edges, seeded at z1's triangle
    def contains(t, z):
        a, b, c = (_lattice_point(*corner, r) for corner in _tri_corners(*t))
        det = (b.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (b.imag - a.imag)
        l2 = ((z.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (z.imag - a.imag)) / det
        l3 = ((b.real - a.real) * (z.imag - a.imag) - (z.real - a.real) * (b.imag - a.imag)) / det
        return min(1.0 - l2 - l3, l2, l3) >= -1e-9

    seed = None
    for cand in _cells_near(z1, r):
        if cand in kept and contains(cand, z1):
            seed = cand
            break
    if seed is None:
        raise ValueError("r too large: z1 is not covered by interior triangles")

    by_edge = {}
    for t in kept:
        cs = _tri_corners(t[0], t[1], t[2])
        for a in range(3):
            e = frozenset((cs[a], cs[(a + 1) % 3]))
            by_edge.setdefault(e, []).append(t)
    comp = {seed}
    queue = [seed]
    while queue:
        t = queue.pop()
        cs = _tri_corners(t[0], t[1], t[2])
        for a in range(3):
            e = frozenset((cs[a], cs[(a + 1) % 3]))
            for s in by_edge[e]:
                if s not in comp:
                    comp.add(s)
                    queue.append(s)

    verts = sorted({c for t in comp for c in _tri_corners(t[0], t[1], t[2])})
    index = {c: k for k, c in enumerate(verts)}
    faces = []
    tri_index = {}
    for t in sorted(comp):
        vs = tuple(index[c] for c in _tri_corners(t[0], t[1], t[2]))
        tri_index[t] = len(faces)
        faces.append(vs)
    edges = sorted({(min(f[a], f[(a + 1) % 3]), max(f[a], f[(a + 1) % 3]))
                    for f in faces for a in range(3)})
    g = Graph.build(len(verts), edges, faces=faces)
    rep = validate_triangulation(g)
    if not rep.valid:
        raise GraphError("lattice component is not a triangulated disk at this "
                         "mesh size: " + "; ".join(rep.reasons))
    coords = np.array([_lattice_point(i, j, r) for i, j in verts])

    dom = HexDomain(polygon=poly, r=float(r), z1=z1, z2=z2, graph=g,
                    coords=coords, lattice_index=index, tri_index=tri_index,
                    inradius=boundary_distance(z1, poly))
    if dom.locate(z2) is None:
        raise ValueError("r too large: z2 is outside the triangulated component")
    return dom


# ------------------------------------------------------------- the map


@dataclass
class DiscreteMap:
    """Simplicial map sending lattice vertices to circle centers of the
    packed image, normalized to fix 0 at z1 and a positive direction at z2."""

    hex: HexDomain
    circles: list
    images: np.ndarray
    residual: float
    normalization: dict
    flipped_faces: int

    @property
    def injective(self) -> bool:
        return self.flipped_faces == 0

    def evaluate(self, z: complex):
        return self.hex.interpolate(z, self.images)


def _count_flipped(g: Graph, images: np.ndarray, reference: np.ndarray) -> int:
    flipped = 0
    for f in g.faces:
        a, b, c = (reference[v] for v in f)
        s0 = (b.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (b.imag - a.imag)
        a, b, c = (images[v] for v in f)
        s1 = (b.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (b.imag - a.imag)
        if s0 * s1 <= 0.0:
            flipped += 1
    return flipped


def discrete_riemann_map(h: HexDomain, tol: float = 1e-9) -> DiscreteMap:
    """Pack the triangulated component into the unit disk and read the
    vertex correspondence off the circle centers."""
    radii = pack_disk(h.graph)
    p = layout(h.graph, radii)
    circles = list(p.circles)

    passes = 0
    w1 = 0.0j
    for passes in range(1, 61):
        images = np.array([c.center for c in circles])
        w1 = h.interpolate(h.z1, images)
        if w1 is None:
            raise PackingError("z1 left the triangulated component during normalization")
        if abs(w1) < tol:
            break
        A = disk_automorphism(w1)
        circles = [mobius_circle(A, c) for c in circles]
    else:
        raise PackingError(f"normalization stalled with |f(z1)| = {abs(w1):.3e}")

    images = np.array([c.center for c in circles])
    w2 = h.interpolate(h.z2, images)
    if w2 is None or abs(w2) < 1e-13:
        raise PackingError("image of z2 degenerated during normalization")
    u = np.conj(w2) / abs(w2)
    R = np.array([[u, 0.0], [0.0, 1.0]], dtype=complex)
    circles = [mobius_circle(R, c) for c in circles]
    images = np.array([c.center for c in circles])

    flipped = _count_flipped(h.graph, images, h.coords)
    return DiscreteMap(
        hex=h, circles=circles, images=images, residual=p.residual,
        normalization={"f_z1": float(abs(w1)), "passes": passes,
                       "rotation": complex(u)},
        flipped_faces=flipped)


# ------------------------------------------------------------ the scan


@dataclass
class ScanRow:
    r: float
    n_vertices: int
    deviation: float


@dataclass
class ScanTable:
    rows: list
    reference: str
    monotone_ok: bool
    maps: list = field(default_factory=list, repr=False)

    @property
    def deviations(self):
        return [row.deviation for row in self.rows]


def _thread_count() -> int:
    env = os.environ.get("CMOD_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def rodin_sullivan_scan(domain, z1, z2, r_list, reference: str = "identity",
                        tol: float = 1e-9) -> ScanTable:
    """Deviation of the discrete map on a fixed compact around z1, per mesh.

    reference "identity" measures sup |f_r(v) - v| (sensible when the
    domain is the unit disk about z1); "previous" measures the deviation
    between successive mesh levels, evaluating the coarser map at the
    finer map's vertices.
    """
    r_list = [float(r) for r in r_list]
    if any(b >= a for a, b in zip(r_list, r_list[1:])):
        raise ValueError("mesh list must be strictly decreasing")
    if reference not in ("identity", "previous"):
        raise ValueError("reference must be 'identity' or 'previous'")
    poly = _poly_array(domain)
    z1, z2 = complex(z1), complex(z2)
    compact = 0.8 * boundary_distance(z1, poly)

    def build(r):
        return discrete_riemann_map(hex_triangulate(poly, r, z1, z2), tol=tol)

    with ThreadPoolExecutor(max_workers=min(_thread_count(), len(r_list))) as ex:
        maps = list(ex.map(build, r_list))

    rows = []
    for k, (r, m) in enumerate(zip(r_list, maps)):
        sel = np.abs(m.hex.coords - z1) <= compact
        if not np.any(sel):
            raise ValueError("compact around z1 contains no lattice vertices")
        if reference == "identity":
            dev = float(np.max(np.abs(m.images[sel] - m.hex.coords[sel])))
        elif k == 0:
            dev = math.nan
        else:
            prev = maps[k - 1]
            best = 0.0
            used = 0
            for v in np.flatnonzero(sel):
                w = prev.evaluate(m.hex.coords[v])
                if w is None:
                    continue
                used += 1
                best = max(best, abs(m.images[v] - w))
            if used == 0:
                raise ValueError("no common evaluation points between mesh levels")
            dev = float(best)
        rows.append(ScanRow(r=r, n_vertices=m.hex.graph.n, deviation=dev))

    finite = [row.deviation for row in rows if math.isfinite(row.deviation)]
    monotone = all(b <= 1.2 * a for a, b in zip(finite, finite[1:]))
    return ScanTable(rows=rows, reference=reference, monotone_ok=monotone, maps=maps)


# ---------------------------------------------------- analytic oracles


def analytic_annulus_modulus(r_inner: float, r_outer: float) -> float:
    """Modulus of the round annulus between two concentric radii."""
    if not 0 < r_inner < r_outer:
        raise ValueError("need 0 < r_inner < r_outer")
    return math.log(r_outer / r_inner) / (2.0 * math.pi)


def analytic_rectangle_modulus(width: float, height: float) -> float:
    """Modulus of the rectangle curve family joining the two height sides."""
    if width <= 0 or height <= 0:
        raise ValueError("rectangle sides must be positive")
    return width / height


def hausdorff_distance(A, B) -> float:
    """Max of the two directed sup-inf distances between finite point sets."""
    def as_points(X):
        arr = np.asarray(X)
        if arr.size == 0:
            raise ValueError("hausdorff distance needs nonempty sets")
        if np.iscomplexobj(arr):
            arr = np.stack([arr.real.ravel(), arr.imag.ravel()], axis=1)
        arr = np.atleast_2d(arr.astype(np.float64))
        if arr.shape[0] == 1 and arr.shape[1] > 2:
            arr = arr.T
        return arr
    a, b = as_points(A), as_points(B)
    if a.shape[1] != b.shape[1]:
        raise ValueError("point sets must share a dimension")
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


# ---------------------------------------------------- packed annuli


@dataclass
class ComparisonReport:
    mod_sup: float
    mod_inf: float
    analytic: float
    ratio_sup: float
    ratio_inf: float
    n_pieces: int
    mesh_r: float
    ok: bool


def packed_annulus_audit(r_inner: float, r_outer: float, mesh_r: float,
                         opts: SolverOptions | None = None) -> ComparisonReport:
    """Both packing moduli of the round annulus discretized by the tiles of
    the regular hexagonal circle packing that meet it, against the
    closed-form value."""
    ana = analytic_annulus_modulus(r_inner, r_outer)
    if mesh_r >= (r_outer - r_inner) / 2.0:
        raise AnnulusError("mesh too coarse to separate the annulus boundaries")
    rho = mesh_r / 2.0
    h = mesh_r * 0.5 * _SQ3
    j_hi = math.ceil((r_outer + mesh_r) / h) + 1
    keep = {}
    for j in range(-j_hi, j_hi + 1):
        i_lo = math.floor((-r_outer - mesh_r) / mesh_r - 0.5 * j) - 1
        i_hi = math.ceil((r_outer + mesh_r) / mesh_r - 0.5 * j) + 1
        for i in range(i_lo, i_hi + 1):
            z = _lattice_point(i, j, mesh_r)
            d = abs(z)
            if r_inner - rho <= d <= r_outer + rho:
                keep[(i, j)] = len(keep)
    if not keep:
        raise AnnulusError("mesh too coarse: no tile meets the annulus")

    anchors = {(i + di, j + dj) for (i, j) in keep
               for di in (-1, 0) for dj in (-1, 0)}
    seen = set()
    faces = []
    for (i, j) in sorted(anchors):
        for up in (True, False):
            cs = _tri_corners(i, j, up)
            if all(c in keep for c in cs):
                face = tuple(keep[c] for c in cs)
                key = tuple(sorted(face))
                if key not in seen:
                    seen.add(key)
                    faces.append(face)
    edges = sorted({(min(f[a], f[(a + 1) % 3]), max(f[a], f[(a + 1) % 3]))
                    for f in faces for a in range(3)})
    centers = np.empty(len(keep), dtype=complex)
    for (i, j), v in keep.items():
        centers[v] = _lattice_point(i, j, mesh_r)
    try:
        host = Graph.build(len(keep), edges, faces=faces)
        from .surface import boundary_cycles as _bcycles
        from .graphs import orient_faces as _orient
        cycles = _bcycles(host, _orient(host))
        if len(cycles) != 2:
            raise AnnulusError(f"found {len(cycles)} boundary cycles")
        means = [float(np.mean(np.abs(centers[list(c)]))) for c in cycles]
        inner = cycles[int(np.argmin(means))]
        outer = cycles[int(np.argmax(means))]
        ann = build_annulus(host, inner=inner, outer=outer)
    except (GraphError, AnnulusError) as exc:
        raise AnnulusError(f"mesh too coarse for the annulus: {exc}")

    hi = mod_sup(ann, opts=opts)
    lo = mod_inf(ann, opts=opts)
    return ComparisonReport(
        mod_sup=hi.value, mod_inf=lo.value, analytic=ana,
        ratio_sup=hi.value / ana, ratio_inf=lo.value / ana,
        n_pieces=len(keep), mesh_r=float(mesh_r),
        ok=lo.value <= hi.value + 1e-6 * max(1.0, hi.value))


# ------------------------------------------------- coverings and bounds


@dataclass(frozen=True)
class DiskCovering:
    """Round pieces of a covering: centers and radii, with incidence
    meaning closed disks intersect."""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=complex).ravel()
        r = np.asarray(self.radii, dtype=np.float64).ravel()
        if c.size != r.size or c.size == 0:
            raise ValueError("centers and radii must be matched and nonempty")
        if np.any(r <= 0):
            raise ValueError("piece radii must be positive")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @property
    def n_pieces(self) -> int:
        return int(self.centers.size)

    def incidence_pairs(self) -> tuple:
        c, r = self.centers, self.radii
        sep = np.abs(c[:, None] - c[None, :])
        touch = sep <= (r[:, None] + r[None, :]) * (1.0 + 1e-9)
        iu = np.triu_indices(c.size, k=1)
        hits = touch[iu]
        return tuple((int(a), int(b)) for a, b in zip(iu[0][hits], iu[1][hits]))

    def covering(self) -> Covering:
        return Covering(n_pieces=self.n_pieces, incidence=self.incidence_pairs())


def hex_disk_covering(center, radius: float, mesh_r: float) -> DiskCovering:
    """Tiles of the regular hexagonal packing lying within a round window."""
    if radius <= 0 or mesh_r <= 0:
        raise ValueError("radius and mesh must be positive")
    c0 = complex(center)
    h = mesh_r * 0.5 * _SQ3
    j_hi = math.ceil((radius + mesh_r) / h) + 1
    pts = []
    for j in range(-j_hi, j_hi + 1):
        i_lo = math.floor((c0.real - radius - mesh_r) / mesh_r - 0.5 * j) - 1
        i_hi = math.ceil((c0.real + radius + mesh_r) / mesh_r - 0.5 * j) + 1
        for i in range(i_lo, i_hi + 1):
            z = complex(_lattice_point(i, j, mesh_r))
            if abs(z - c0) <= radius:
                pts.append(z)
    if not pts:
        raise ValueError("window holds no tile at this mesh")
    arr = np.array(pts, dtype=complex)
    return DiskCovering(centers=arr, radii=np.full(arr.size, mesh_r / 2.0))


def dyadic_ring_covering(x, ell: float, L: float, per_ring: int = 12,
                         growth: float = 2.0) -> DiskCovering:
    """Round pieces on geometric rings between radii ell and L about x,
    sized like their distance from x.  The natural covering for test
    metrics of the form diam/dist."""
    if not 0 < ell < L:
        raise ValueError("need 0 < ell < L")
    if per_ring < 6 or growth <= 1.0:
        raise ValueError("need per_ring >= 6 and growth > 1")
    x = complex(x)
    n_rings = max(1, math.ceil(math.log(L / ell) / math.log(growth)))
    ring_r = np.geomspace(ell, L, n_rings + 1)
    piece = 1.5 * math.sin(math.pi / per_ring)
    centers, radii = [], []
    for k, rr in enumerate(ring_r):
        offset = 0.5 * (k % 2)
        for t in range(per_ring):
            ang = 2.0 * math.pi * (t + offset) / per_ring
            centers.append(x + rr * np.exp(1j * ang))
            radii.append(piece * rr)
    return DiskCovering(centers=np.array(centers), radii=np.array(radii))


@dataclass
class UpperBoundReport:
    modulus: float
    bound: float
    min_length: float
    log_ratio: float
    bound_log_ratio: float
    n_pieces: int
    result: ModulusResult


def annulus_upper_bound_audit(x, ell: float, L: float, covering: DiskCovering,
                              opts: SolverOptions | None = None,
                              tol: float = 1e-7) -> UpperBoundReport:
    """Modulus separating B(x, ell) from the complement of B(x, L) on the
    covering nerve, checked against the diam-over-dist test metric."""
    if L < 2.0 * ell or ell <= 0:
        raise ValueError("need L >= 2 ell > 0")
    x = complex(x)
    g = nerve(covering.covering())
    d = np.abs(covering.centers - x)
    E = tuple(int(v) for v in np.flatnonzero(d - covering.radii <= ell))
    F = tuple(int(v) for v in np.flatnonzero(d + covering.radii >= L))
    if not E or not F:
        raise ValueError("covering does not reach both ball boundaries")
    if set(E) & set(F):
        raise ValueError("covering too coarse: a piece meets both balls")

    res = modulus_condenser(g, E, F, Q=2.0, opts=opts)

    in_zone = (d + covering.radii >= ell) & (d - covering.radii <= L)
    rho = np.zeros(g.n)
    dist = np.maximum(d - covering.radii, ell / 4.0)
    rho[in_zone] = 2.0 * covering.radii[in_zone] / dist[in_zone]
    ell_min, _ = shortest_curve(g, CurveFamily.connect(E, F), rho)
    if ell_min <= 0.0:
        raise ValueError("test metric admits a zero-length joining curve")
    bound = q_volume(rho, 2.0) / ell_min ** 2

    if res.modulus > bound + max(tol, 1e-7 * bound):
        raise RuntimeError(
            f"solver modulus {res.modulus:.6g} exceeds test-metric bound {bound:.6g}")
    logf = math.log(L / ell)
    return UpperBoundReport(
        modulus=res.modulus, bound=bound, min_length=float(ell_min),
        log_ratio=res.modulus * logf, bound_log_ratio=bound * logf,
        n_pieces=covering.n_pieces, result=res)
