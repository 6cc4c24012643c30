import numpy as np
from cmod.triangulate import (triangulated_cylinder, hex_disk, wheel,
                              collared_wheel, tetrahedron, octahedron,
                              icosahedron, loop_subdivide,
                              sphere_triangulation,
                              random_sphere_triangulation)
from cmod.graphs import validate_triangulation
from cmod.surface import build_annulus, mod_inf, mod_sup, infsup_audit

for name, (g, pts) in [("tetra", tetrahedron()), ("octa", octahedron()),
                       ("icosa", icosahedron())]:
    rep = validate_triangulation(g, require_closed=True)
    print(name, g.n, g.m, len(g.faces), "valid:", rep.valid, rep.reasons)

g5, p5 = sphere_triangulation(5)
print("depth5:", g5.n, "faces", len(g5.faces))

gr = random_sphere_triangulation(2, 120, seed=7)
rep = validate_triangulation(gr, require_closed=True)
degs = [gr.degree(v) for v in range(gr.n)]
print("random sphere:", gr.n, "valid:", rep.valid, "deg range",
      min(degs), max(degs))

gh, ch = hex_disk(3)
rep = validate_triangulation(gh)
print("hex disk:", gh.n, gh.m, len(gh.faces), "valid:", rep.valid, rep.reasons)

gw = wheel(7)
print("wheel7 valid:", validate_triangulation(gw).valid)
gc, rim = collared_wheel(5, 3)
rep = validate_triangulation(gc)
print("collared:", gc.n, "rim", len(rim), "valid:", rep.valid, rep.reasons)

# triangulated cylinders behave like quad cylinders for both moduli
for seed in (None, 1, 2):
    g, r0, r1 = triangulated_cylinder(6, 3, seed=seed)
    ann = build_annulus(g, inner=r0, outer=r1)
    rep = infsup_audit(ann)
    print(f"tri-cyl seed={seed}: inf={rep.mod_inf:.6f} sup={rep.mod_sup:.6f} "
          f"ok={rep.ok} certified={rep.inf_result.certified}")
