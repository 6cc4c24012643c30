"""Array kernels for the hot loops.

Three computations dominate every large run: the vertex-weighted
shortest-path oracle called repeatedly by constraint generation, the
Gauss-Seidel radius sweeps of the circle packing iteration, and the
Cholesky updates behind the active-set quadratic solver.  All are written
in nopython-compatible style and compiled through :mod:`cmod._backend`.
"""

import math

import numpy as np

from ._backend import jit

__all__ = [
    "dijkstra_vertex",
    "pack_sweeps",
    "pack_residual",
    "chol_insert",
    "chol_delete",
    "chol_solve",
]

_INF = np.inf
_NOHOP = np.int64(np.iinfo(np.int64).max)


@jit
def dijkstra_vertex(indptr, nbrs, w, sources, stop_node):
    """Multi-source shortest path where a path pays the weight of every
    vertex it visits, endpoints included.

    Ties in total weight are broken by fewer vertices, then by smaller
    vertex id, which makes the distance labels reproducible.  ``stop_node``
    >= 0 allows early exit once that vertex is settled.

    Returns (dist, hops): dist[v] is the cheapest vertex-weight sum over
    paths from any source to v; hops[v] the fewest vertices among those.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, _INF)
    hops = np.full(n, _NOHOP)
    settled = np.zeros(n, dtype=np.uint8)

    cap = nbrs.shape[0] + sources.shape[0] + 1
    hd = np.empty(cap, dtype=np.float64)
    hh = np.empty(cap, dtype=np.int64)
    hn = np.empty(cap, dtype=np.int64)
    size = 0

    for i in range(sources.shape[0]):
        s = sources[i]
        d = w[s]
        if d < dist[s] or (d == dist[s] and np.int64(1) < hops[s]):
            dist[s] = d
            hops[s] = 1
            # heap push
            j = size
            hd[j] = d
            hh[j] = 1
            hn[j] = s
            size += 1
            while j > 0:
                p = (j - 1) >> 1
                if hd[j] < hd[p] or (
                    hd[j] == hd[p]
                    and (hh[j] < hh[p] or (hh[j] == hh[p] and hn[j] < hn[p]))
                ):
                    hd[j], hd[p] = hd[p], hd[j]
                    hh[j], hh[p] = hh[p], hh[j]
                    hn[j], hn[p] = hn[p], hn[j]
                    j = p
                else:
                    break

    while size > 0:
        d0 = hd[0]
        h0 = hh[0]
        v = hn[0]
        size -= 1
        hd[0] = hd[size]
        hh[0] = hh[size]
        hn[0] = hn[size]
        j = 0
        while True:
            l = 2 * j + 1
            if l >= size:
                break
            r = l + 1
            m = l
            if r < size and (
                hd[r] < hd[l]
                or (
                    hd[r] == hd[l]
                    and (hh[r] < hh[l] or (hh[r] == hh[l] and hn[r] < hn[l]))
                )
            ):
                m = r
            if hd[m] < hd[j] or (
                hd[m] == hd[j]
                and (hh[m] < hh[j] or (hh[m] == hh[j] and hn[m] < hn[j]))
            ):
                hd[j], hd[m] = hd[m], hd[j]
                hh[j], hh[m] = hh[m], hh[j]
                hn[j], hn[m] = hn[m], hn[j]
                j = m
            else:
                break

        if settled[v] == 1:
            continue
        if d0 != dist[v] or h0 != hops[v]:
            continue
        settled[v] = 1
        if v == stop_node:
            break

        for e in range(indptr[v], indptr[v + 1]):
            u = nbrs[e]
            if settled[u] == 1:
                continue
            nd = d0 + w[u]
            nh = h0 + 1
            if nd < dist[u] or (nd == dist[u] and nh < hops[u]):
                dist[u] = nd
                hops[u] = nh
                j = size
                hd[j] = nd
                hh[j] = nh
                hn[j] = u
                size += 1
                while j > 0:
                    p = (j - 1) >> 1
                    if hd[j] < hd[p] or (
                        hd[j] == hd[p]
                        and (
                            hh[j] < hh[p]
                            or (hh[j] == hh[p] and hn[j] < hn[p])
                        )
                    ):
                        hd[j], hd[p] = hd[p], hd[j]
                        hh[j], hh[p] = hh[p], hh[j]
                        hn[j], hn[p] = hn[p], hn[j]
                        j = p
                    else:
                        break

    return dist, hops


@jit
def _angle_sum(a, av, fdat, lo, hi):
    # Hyperbolic angle sum at a vertex with parameter av = exp(-2h) over the
    # cyclic flower fdat[lo:hi]; neighbors with a=0 are horocycles.
    th = 0.0
    for j in range(lo, hi):
        u = fdat[j]
        t = j + 1
        if t == hi:
            t = lo
        v2 = fdat[t]
        au = a[u]
        aw = a[v2]
        num = av * (1.0 - au) * (1.0 - aw)
        den = (1.0 - av * au) * (1.0 - av * aw)
        s2 = num / den
        if s2 > 1.0:
            s2 = 1.0
        elif s2 < 0.0:
            s2 = 0.0
        th += 2.0 * math.asin(math.sqrt(s2))
    return th


@jit
def pack_residual(a, interior, fptr, fdat):
    """Max |angle sum - 2*pi| over the interior vertices."""
    target = 2.0 * math.pi
    res = 0.0
    for ii in range(interior.shape[0]):
        v = interior[ii]
        th = _angle_sum(a, a[v], fdat, fptr[ii], fptr[ii + 1])
        r = abs(th - target)
        if r > res:
            res = r
    return res


@jit
def _uniform_update(av, th, k):
    # Radius (as a = exp(-2h)) making the angle sum hit 2*pi if the current
    # flower were replaced by k equal neighbors producing the same th.
    beta = math.sin(th / (2.0 * k))
    delta = math.sin(math.pi / k)
    sa = math.sqrt(av)
    vh = (sa - beta) / (sa * (1.0 - beta * sa))
    if vh < 0.0:
        vh = 0.0
    elif vh > 1.0:
        vh = 1.0
    one = 1.0 - vh
    t = 2.0 * delta / (one + math.sqrt(one * one + 4.0 * delta * delta * vh))
    an = t * t
    if an < 1e-300:
        an = 1e-300
    elif an > 1.0 - 1e-15:
        an = 1.0 - 1e-15
    return an


@jit
def pack_sweeps(a, interior, fptr, fdat, tol, max_sweeps, accel_every):
    """Gauss-Seidel sweeps of the uniform-neighbor update, ascending vertex
    order, until the angle-sum residual drops below tol.

    Boundary entries of ``a`` (value 0) are never touched.  Every
    ``accel_every`` sweeps a guarded geometric extrapolation of the last
    increment is attempted and kept only when it lowers the true residual,
    so the per-sweep residual trace stays non-increasing.  accel_every=0
    disables acceleration.  Mutates ``a``; returns (residual, sweeps, trace)
    with trace[i] the as-visited residual of sweep i.
    """
    target = 2.0 * math.pi
    ni = interior.shape[0]
    trace = np.empty(max_sweeps, dtype=np.float64)
    prev = np.empty(ni, dtype=np.float64)
    dlast = np.zeros(ni, dtype=np.float64)
    nlast = 0.0
    sweeps = 0
    res = _INF

    while sweeps < max_sweeps:
        for ii in range(ni):
            prev[ii] = a[interior[ii]]
        maxres = 0.0
        for ii in range(ni):
            v = interior[ii]
            lo = fptr[ii]
            hi = fptr[ii + 1]
            th = _angle_sum(a, a[v], fdat, lo, hi)
            r = abs(th - target)
            if r > maxres:
                maxres = r
            a[v] = _uniform_update(a[v], th, hi - lo)
        trace[sweeps] = maxres
        sweeps += 1

        if maxres < tol:
            res = pack_residual(a, interior, fptr, fdat)
            if res < tol:
                break

        if accel_every > 0 and sweeps % accel_every == 0:
            ncur = 0.0
            for ii in range(ni):
                d = a[interior[ii]] - prev[ii]
                dlast[ii] = d
                ncur += d * d
            ncur = math.sqrt(ncur)
            if nlast > 0.0 and ncur > 0.0:
                lam = ncur / nlast
                if 0.0 < lam < 0.98:
                    f = lam / (1.0 - lam)
                    base = pack_residual(a, interior, fptr, fdat)
                    for ii in range(ni):
                        v = interior[ii]
                        x = a[v] + f * dlast[ii]
                        if x < 1e-300:
                            x = 1e-300
                        elif x > 1.0 - 1e-15:
                            x = 1.0 - 1e-15
                        prev[ii] = a[v]
                        a[v] = x
                    trial = pack_residual(a, interior, fptr, fdat)
                    if trial >= base:
                        for ii in range(ni):
                            a[interior[ii]] = prev[ii]
            nlast = ncur

    if res == _INF:
        res = pack_residual(a, interior, fptr, fdat)
    return res, sweeps, trace[:sweeps]


@jit
def chol_insert(F, k, c, g):
    """Grow the upper-triangular factor R = F[:k, :k] by one index whose
    Gram column against the current indices is c and whose diagonal entry
    is g.  Writes column k of F in place; the diagonal is floored away from
    zero so a linearly dependent insertion stays solvable."""
    for i in range(k):
        s = c[i]
        for p in range(i):
            s -= F[p, i] * F[p, k]
        F[i, k] = s / F[i, i]
    d2 = g
    for p in range(k):
        d2 -= F[p, k] * F[p, k]
    floor = 1e-12 * g
    if floor < 1e-300:
        floor = 1e-300
    if d2 < floor:
        d2 = floor
    F[k, k] = math.sqrt(d2)


@jit
def chol_delete(F, k, pos):
    """Remove index ``pos`` from the k-index factor R = F[:k, :k] by a
    column shift and a Givens sweep, leaving a valid (k-1)-index factor."""
    for col in range(pos, k - 1):
        for r in range(k):
            F[r, col] = F[r, col + 1]
    for i in range(pos, k - 1):
        a = F[i, i]
        b = F[i + 1, i]
        r = math.hypot(a, b)
        if r > 0.0:
            ca = a / r
            sa = b / r
            for col in range(i, k - 1):
                u = F[i, col]
                v = F[i + 1, col]
                F[i, col] = ca * u + sa * v
                F[i + 1, col] = ca * v - sa * u
    for r in range(k):
        F[r, k - 1] = 0.0
        F[k - 1, r] = 0.0


@jit
def chol_solve(F, k, b):
    """Solve (R^T R) x = b for the factor R = F[:k, :k], overwriting b."""
    for i in range(k):
        s = b[i]
        for p in range(i):
            s -= F[p, i] * b[p]
        b[i] = s / F[i, i]
    for i in range(k - 1, -1, -1):
        s = b[i]
        for p in range(i + 1, k):
            s -= F[i, p] * b[p]
        b[i] = s / F[i, i]
    return b
