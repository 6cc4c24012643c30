import sys
sys.path.insert(0, "tests")
import numpy as np
from oracles import all_separating_cycles, cvxpy_modulus
from cmod.triangulate import triangulated_cylinder
from cmod.surface import build_annulus, shortest_separating_cycle, mod_inf
from cmod.graphs import Curve

for (n, m, seed) in [(3, 3, 11), (4, 3, 12), (3, 4, 13), (4, 3, None)]:
    g, r0, r1 = triangulated_cylinder(n, m, seed=seed)
    ann = build_annulus(g, inner=r0, outer=r1)
    cycles = all_separating_cycles(g, g.faces, r0, r1)
    print(f"C{n}xP{m} seed={seed}: {len(cycles)} separating cycles")
    rng = np.random.default_rng(100 + (seed or 0))
    for trial in range(6):
        if trial == 0:
            rho = np.ones(g.n)
        else:
            rho = rng.uniform(0.0, 2.0, size=g.n)
            rho[rho < 0.15] = 0.0
        ell, c = shortest_separating_cycle(ann, rho)
        brute = min(sum(rho[v] for v in cyc) for cyc in cycles)
        ok = abs(ell - brute) <= 1e-12 * max(1.0, brute)
        print(f"  trial {trial}: solver={ell:.12f} brute={brute:.12f} "
              f"{'OK' if ok else 'MISMATCH'}")
        if not ok:
            best = min(cycles, key=lambda cyc: sum(rho[v] for v in cyc))
            print("   brute best:", best, "solver cycle:", c.vertices)
    # modulus vs cvxpy over the explicit brute family
    val, _ = cvxpy_modulus(g.n, [list(cyc) for cyc in cycles], Q=2.0)
    got = mod_inf(ann).value
    print(f"  mod_inf={got:.9f} cvxpy={val:.9f} diff={abs(got-val):.2e}")
