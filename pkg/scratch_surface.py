import sys
sys.path.insert(0, "tests")
import numpy as np
from conftest import cylinder_graph
from cmod.surface import (build_annulus, shortest_separating_cycle, mod_inf,
                          mod_sup, infsup_audit, tight_separating_cycles,
                          cycle_separates, AnnulusError)
from cmod.modulus import beurling_check
from cmod.graphs import CurveFamily, Condenser

g, r0, r1 = cylinder_graph(6, 3)
ann = build_annulus(g, inner=r0, outer=r1)
print("rims:", ann.inner, ann.outer)

rho = np.ones(g.n)
ell, c = shortest_separating_cycle(ann, rho)
print("shortest sep cycle:", ell, c.vertices, "separates:",
      cycle_separates(g, c.vertices, ann.inner, ann.outer))

lo = mod_inf(ann)
hi = mod_sup(ann)
print("mod_inf:", lo.value, lo.result.certified, lo.result.message)
print("mod_sup:", hi.value, hi.result.certified)

rep = infsup_audit(ann)
print("infsup ok:", rep.ok, rep.mod_inf, rep.mod_sup, "margin", rep.margin)

tight, trunc = tight_separating_cycles(ann, rho / 6.0, 1e-7, 200)
print("tight cycles:", len(tight), "trunc:", trunc)
for t in tight:
    print("  ", t.vertices)

br = beurling_check(g, CurveFamily(kind="separate", condenser=Condenser(r0, r1),
                                   annulus=ann), rho)
print("beurling on rho=1:", br.valid, br.stationarity_residual)

# C12 x P3 -> mod_inf 1/4 ; C8 x P4 -> mod_sup 1/2 ; C4 x P8 -> 2
for (na, ml) in [(12, 3), (8, 4), (4, 8)]:
    g2, a0, a1 = cylinder_graph(na, ml)
    an2 = build_annulus(g2, inner=a0, outer=a1)
    print(f"C{na}xP{ml}: inf={mod_inf(an2).value:.6f} sup={mod_sup(an2).value:.6f}")

# theta graph should fail: two vertices joined by three paths -> faces?
# simplest non-annulus with faces: a disk (single hex wheel)
from conftest import grid_graph
try:
    gd, idx = grid_graph(3, 3)
    build_annulus(gd)
except AnnulusError as e:
    print("grid without faces rejected:", e)
