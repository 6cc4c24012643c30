import math
import numpy as np
from cmod.triangulate import (wheel, hex_disk, tetrahedron, octahedron,
                              icosahedron, collared_wheel)
from cmod.packing import (pack_disk, layout, pack_sphere, mobius_normalize,
                          ring_lemma_audit, build_toiture, tangency_residual)
from cmod.geometry import Circle

# hex wheel: center euclid radius 1/3, petals 1/3
g = wheel(6)
rad = pack_disk(g)
print("wheel6: a0 =", rad.a[0], "residual", rad.residual, "sweeps", rad.sweeps)
p = layout(g, rad)
c0 = p.circles[0]
print("  center circle:", c0.center, c0.radius, "layout residual", p.residual)
for v in (1, 2, 3):
    print("  petal", v, p.circles[v].center, p.circles[v].radius)

# wheel with degree 7
g7 = wheel(7)
p7 = layout(g7, pack_disk(g7))
print("wheel7 residual:", p7.residual)

# two-ring hex disk: central radius largest
gh, _ = hex_disk(2)
radh = pack_disk(gh)
ph = layout(gh, radh)
rads = [c.radius for c in ph.circles]
print("hex2: layout residual", ph.residual, "sweeps", radh.sweeps)
print("  monotone trace:", bool(np.all(np.diff(radh.trace) <= 1e-15)))

# tetrahedron -> Descartes
gt, _ = tetrahedron()
pt = pack_sphere(gt, (0, 1, 2))
ks = []
for c in pt.circles:
    ks.append((-1.0 if c.complement else 1.0) / c.radius)
lhs = sum(ks) ** 2
rhs = 2 * sum(k * k for k in ks)
print("K4 descartes:", lhs, rhs, "diff", abs(lhs - rhs), "residual", pt.residual)
print("  center a1:", pt.circles[0].center, " center a2:", pt.circles[1].center)

# octahedron: 6 circles, opposite pairs disjoint
go, pts = octahedron()
po = pack_sphere(go, (0, 2, 4))
print("octa residual:", po.residual)
for (i, j) in [(0, 1), (2, 3), (4, 5)]:
    ci, cj = po.circles[i], po.circles[j]
    if ci.complement or cj.complement:
        inner = cj if ci.complement else ci
        outer = ci if ci.complement else cj
        sep = abs(inner.center - outer.center) - (outer.radius + inner.radius)
        disjoint = abs(inner.center - outer.center) + ... if False else None
        # inner disjoint from complement disk: inner inside the circle
        disjoint = abs(inner.center - outer.center) + inner.radius < outer.radius
    else:
        disjoint = abs(ci.center - cj.center) > ci.radius + cj.radius
    print(f"  pair {i},{j} disjoint: {disjoint}")

# icosahedron
gi, _ = icosahedron()
pi = pack_sphere(gi, (0, 1, 2))
print("icosa residual:", pi.residual)

# idempotence of normalization
pt2 = mobius_normalize(pt, (0, 1, 2))
drift = max(abs(c1.center - c2.center) + abs(c1.radius - c2.radius)
            for c1, c2 in zip(pt.circles, pt2.circles))
print("normalize idempotent drift:", drift)

# ring lemma on collared wheels
for d in (5, 6, 7):
    gc, rim = collared_wheel(d, 3)
    pc = layout(gc, pack_disk(gc))
    audit = ring_lemma_audit(pc, 12)
    print(f"collared d={d}: ratios {dict(sorted(audit.items()))} residual {pc.residual:.2e}")

# toiture of K4
toit = build_toiture(pt, samples=4000)
print("K4 toiture roundness:", np.round(toit.roundness, 4), "max", toit.max_roundness)
