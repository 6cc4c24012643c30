"""Independent reference computations for the test suite.

Everything here is deliberately naive: exhaustive enumeration plus a
generic convex solver.  Expected values frozen into the tests were
produced by these routines, so the package code under test never defines
its own pass criteria.
"""

import heapq
import itertools

import numpy as np


def simple_paths(g, E, F, cap=200000):
    """Every simple path from a vertex of E to a vertex of F, as vertex
    tuples.  DFS over neighbor lists, smallest start and step first."""
    Fset = set(F)
    out = []
    for s in sorted(set(E)):
        stack = [(s, (s,))]
        while stack:
            v, path = stack.pop()
            if v in Fset:
                out.append(path)
                if len(out) > cap:
                    raise RuntimeError("path enumeration blew the cap")
                continue
            for w in reversed(sorted(int(x) for x in g.neighbors(v))):
                if w not in path:
                    stack.append((w, path + (w,)))
    return out


def cvxpy_modulus(n, curves, Q):
    """Reference modulus of an explicit curve collection via cvxpy."""
    import cvxpy as cp

    rho = cp.Variable(n, nonneg=True)
    cons = []
    for c in curves:
        cons.append(cp.sum(rho[list(c)]) >= 1)
    if Q == 2:
        obj = cp.sum_squares(rho)
    else:
        obj = cp.sum(cp.power(rho, Q))
    prob = cp.Problem(cp.Minimize(obj), cons)
    val = prob.solve()
    return float(val), np.asarray(rho.value, dtype=float)


def brute_connect_modulus(g, E, F, Q=2.0):
    """Connect-family modulus by enumerating all simple paths.  Valid
    because every connecting curve contains a simple joining subpath, so
    the minimal curves are exactly the simple paths."""
    paths = simple_paths(g, E, F)
    return cvxpy_modulus(g.n, paths, Q)


def dijkstra_ref(g, rho, sources):
    """Vertex-weighted shortest path with (cost, hops) lexicographic keys,
    written against heapq as an independent check of the compiled kernel."""
    n = g.n
    dist = [float("inf")] * n
    hops = [None] * n
    heap = []
    for s in set(sources):
        d = float(rho[s])
        if d < dist[s]:
            dist[s] = d
            hops[s] = 1
            heapq.heappush(heap, (d, 1, s))
    done = [False] * n
    while heap:
        d, h, v = heapq.heappop(heap)
        if done[v] or (d, h) != (dist[v], hops[v]):
            continue
        done[v] = True
        for u in g.neighbors(v):
            u = int(u)
            if done[u]:
                continue
            nd, nh = d + float(rho[u]), h + 1
            if nd < dist[u] or (nd == dist[u] and nh < hops[u]):
                dist[u], hops[u] = nd, nh
                heapq.heappush(heap, (nd, nh, u))
    return dist, hops


def all_simple_cycles(g, cap=500000):
    """Every simple cycle, each reported once: minimum vertex first, the
    smaller of the two neighbors second.  Exponential; tiny graphs only."""
    cycles = []

    def dfs(s, v, path, visited):
        for u in sorted(int(x) for x in g.neighbors(v)):
            if u == s and len(path) >= 3 and path[1] < path[-1]:
                cycles.append(tuple(path))
                if len(cycles) > cap:
                    raise RuntimeError("cycle enumeration blew the cap")
            elif u > s and u not in visited:
                visited.add(u)
                path.append(u)
                dfs(s, u, path, visited)
                path.pop()
                visited.remove(u)

    for s in range(g.n):
        dfs(s, s, [s], {s})
    return cycles


def all_separating_cycles(g, faces, E, F, cap=500000):
    """Simple cycles separating E from F: deleting the cycle leaves no
    path from E to F.  Exponential; tiny graphs only."""
    out = set()
    for cyc in all_simple_cycles(g, cap=cap):
        if _separates(g, set(cyc), E, F):
            out.add(_canon_cycle(cyc))
    return sorted(out)


def _canon_cycle(seq):
    best = None
    k = len(seq)
    for s in (seq, seq[::-1]):
        for i in range(k):
            cand = s[i:] + s[:i]
            if best is None or cand < best:
                best = cand
    return best


def _separates(g, banned, E, F):
    seen = set()
    stack = [v for v in E if v not in banned]
    seen.update(stack)
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            u = int(u)
            if u in banned or u in seen:
                continue
            seen.add(u)
            stack.append(u)
    return not (set(F) & seen)
