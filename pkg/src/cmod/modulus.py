"""Combinatorial modulus of curve families on vertex-weighted graphs.

The modulus of a family of curves in a graph with vertex weights rho is
the infimum of volume(rho) / min-length(rho)^Q over admissible weights.
The solver works on the equivalent constrained program

    minimize sum_s rho(s)^Q   subject to  sum_{s in gamma} rho(s) >= 1

for every curve gamma of the family, generating the constraints lazily:
only the curves returned by a shortest-curve oracle ever enter the
working set.  The dual multipliers of the final working set form an
extremality certificate (each unit-length curve carries weight lambda
and Q rho^{Q-1} is the weighted curve-indicator sum).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Condenser, Curve, CurveFamily, Graph
from .kernels import chol_delete, chol_insert, chol_solve, dijkstra_vertex

__all__ = [
    "SolverOptions",
    "ModulusResult",
    "BeurlingReport",
    "modulus",
    "modulus_condenser",
    "shortest_curve",
    "rho_length",
    "q_volume",
    "admissible_ratio",
    "beurling_check",
    "compare_equivalent_graphs",
    "covering_overlap_compare",
]

_NOHOP = np.int64(np.iinfo(np.int64).max)


@dataclass
class SolverOptions:
    """Tolerances and limits for the modulus solver.

    tol        -- inner optimizer tolerance (complementarity / projected
                  gradient).
    sep_tol    -- constraint generation stops once the shortest curve has
                  length >= 1 - sep_tol.
    max_outer  -- cap on oracle rounds; default 10 * n.
    cert_tol   -- certificate acceptance threshold on the complementarity
                  residual.
    batch_curves -- how many violated curves the oracle may hand the
                  working set per round; 1 recovers one-at-a-time
                  constraint generation.
    """

    tol: float = 1e-9
    sep_tol: float = 1e-7
    max_outer: int | None = None
    cert_tol: float = 1e-6
    inner_max_iter: int = 20000
    batch_curves: int = 12


@dataclass
class ModulusResult:
    modulus: float
    rho: np.ndarray
    Q: float
    active_curves: tuple[Curve, ...]
    multipliers: np.ndarray
    kkt_residual: float
    min_length: float
    iterations: int
    certified: bool
    message: str = ""

    def __repr__(self):
        return (
            f"ModulusResult(modulus={self.modulus:.12g}, Q={self.Q:g}, "
            f"curves={len(self.active_curves)}, certified={self.certified})"
        )


def rho_length(curve: Curve, rho: np.ndarray) -> float:
    """Weight a curve picks up: the sum of rho over its vertices."""
    return float(sum(rho[v] for v in curve.vertices))


def q_volume(rho: np.ndarray, Q: float) -> float:
    return float(np.sum(np.asarray(rho, dtype=float) ** Q))


def admissible_ratio(g: Graph, family: CurveFamily, rho, Q: float = 2.0) -> float:
    """volume / min-length^Q for a concrete metric; infinite when the
    family has a zero-length curve, 0 for an empty family."""
    rho = _as_rho(g, rho)
    ell, cur = shortest_curve(g, family, rho)
    if cur is None:
        return 0.0
    if ell <= 0.0:
        return math.inf
    return q_volume(rho, Q) / ell ** Q


def _as_rho(g: Graph, rho) -> np.ndarray:
    r = np.asarray(rho, dtype=np.float64)
    if r.shape != (g.n,):
        raise ValueError(f"rho must have shape ({g.n},)")
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValueError("rho must be finite and nonnegative")
    return r


# ---------------------------------------------------------------- oracle


def _dijkstra(g: Graph, rho: np.ndarray, sources, stop: int = -1):
    src = np.asarray(sorted(sources), dtype=np.int64)
    return dijkstra_vertex(g.indptr, g.nbrs, rho, src, np.int64(stop))


def _lex_walk(g: Graph, rho: np.ndarray, dist, hops, start: int) -> list[int]:
    """Forward walk along (cost, hops)-tight steps, smallest id first.

    dist/hops come from a Dijkstra run toward the terminal set, so the walk
    ends exactly when hops reaches 1.
    """
    path = [start]
    cur = start
    while hops[cur] != 1:
        nxt = -1
        for w in g.neighbors(cur):
            w = int(w)
            if hops[w] == _NOHOP or hops[w] + 1 != hops[cur]:
                continue
            if dist[w] + rho[cur] == dist[cur]:
                nxt = w
                break
        if nxt < 0:
            # exact float equality failed; retry with a sloppy margin
            best = None
            for w in g.neighbors(cur):
                w = int(w)
                if hops[w] == _NOHOP or hops[w] + 1 != hops[cur]:
                    continue
                slack = abs(dist[w] + rho[cur] - dist[cur])
                if slack <= 1e-12 * max(1.0, abs(dist[cur])) and (best is None or w < best):
                    best = w
            if best is None:
                raise RuntimeError("shortest-path reconstruction lost the trail")
            nxt = best
        path.append(nxt)
        cur = nxt
    return path


def _shortest_connect(g: Graph, cond: Condenser, rho: np.ndarray):
    dist, hops = _dijkstra(g, rho, cond.F)
    best = None
    for u in cond.E:
        key = (float(dist[u]), int(hops[u]), u)
        if best is None or key < best:
            best = key
    if best is None or not math.isfinite(best[0]):
        return math.inf, None
    path = _lex_walk(g, rho, dist, hops, best[2])
    return best[0], Curve(tuple(path))


def _shortest_explicit(family: CurveFamily, rho: np.ndarray):
    best = None
    arg = None
    for c in family.curves:
        key = (rho_length(c, rho), len(c.vertices), c.key())
        if best is None or key < best:
            best = key
            arg = c
    return (best[0], arg) if arg is not None else (math.inf, None)


def _shortest_diameter(g: Graph, family: CurveFamily, rho: np.ndarray):
    pos = np.asarray(family.positions, dtype=float)
    if pos.ndim == 1:
        pos = pos[:, None]
    if pos.shape[0] != g.n:
        raise ValueError("positions must cover every vertex")
    L = family.length
    best = None
    for u in range(g.n):
        gap = np.linalg.norm(pos - pos[u], axis=1)
        fars = np.nonzero(gap >= L)[0]
        fars = fars[fars > u]
        if fars.size == 0:
            continue
        dist, hops = _dijkstra(g, rho, [u])
        for v in fars:
            key = (float(dist[v]), int(hops[v]), u, int(v))
            if best is None or key < best:
                best = key
    if best is None:
        return math.inf, None
    u, v = best[2], best[3]
    dist, hops = _dijkstra(g, rho, [v])
    path = _lex_walk(g, rho, dist, hops, u)
    return best[0], Curve(tuple(path))


def _violated_extras(g: Graph, family: CurveFamily, rho: np.ndarray,
                     threshold: float, limit: int) -> list[Curve]:
    """Additional family members shorter than the threshold, to grow the
    working set several constraints per oracle round.  Deterministic, and
    empty when the family kind has no cheap batch harvest."""
    if limit <= 1:
        return []
    if family.kind == "connect":
        cond = family.condenser
        dist, hops = _dijkstra(g, rho, cond.F)
        cands = sorted(
            (float(dist[u]), int(hops[u]), int(u))
            for u in cond.E
            if math.isfinite(dist[u]) and dist[u] < threshold)
        out = []
        used = np.zeros(g.n, dtype=bool)
        for _, _, u in cands[:4 * limit]:
            if len(out) >= limit:
                break
            path = _lex_walk(g, rho, dist, hops, u)
            arr = np.asarray(path, dtype=np.int64)
            if used[arr].sum() > 0.5 * arr.size:
                continue
            used[arr] = True
            out.append(Curve(tuple(path)))
        return out
    if family.kind == "separate":
        from .surface import violated_separating_cycles

        return violated_separating_cycles(family.annulus, rho, threshold, limit)
    return []


def shortest_curve(g: Graph, family: CurveFamily, rho) -> tuple[float, Curve | None]:
    """Length and witness of the shortest family member under rho.

    Ties break toward fewer vertices, then lexicographically smaller
    vertex sequences, so repeated runs return the same curve.
    """
    rho = _as_rho(g, rho)
    if family.kind == "explicit":
        return _shortest_explicit(family, rho)
    if family.kind == "connect":
        return _shortest_connect(g, family.condenser, rho)
    if family.kind == "separate":
        from .surface import shortest_separating_cycle

        return shortest_separating_cycle(family.annulus, rho)
    if family.kind == "diameter_at_least":
        return _shortest_diameter(g, family, rho)
    raise ValueError(f"unknown family kind {family.kind!r}")


# ------------------------------------------------------- inner solvers


class _WorkingSet:
    """Active curves with their Gram matrix of shared-vertex counts."""

    def __init__(self, n: int):
        self.n = n
        self.curves: list[Curve] = []
        self.supports: list[np.ndarray] = []
        self.keys: set = set()
        self._gram = np.zeros((16, 16))
        # flat incidence (vertex, curve index) over all supports, so Gram
        # rows and length sums stay vectorized as the set grows
        self._inc_v = np.empty(256, dtype=np.int64)
        self._inc_c = np.empty(256, dtype=np.int64)
        self._inc_len = 0
        self.factor = None

    def __len__(self):
        return len(self.curves)

    @property
    def gram(self) -> np.ndarray:
        m = len(self.curves)
        return self._gram[:m, :m]

    def add(self, curve: Curve) -> bool:
        k = curve.key()
        if k in self.keys:
            return False
        sup = np.asarray(sorted(curve.vertices), dtype=np.int64)
        m = len(self.curves)
        if m + 1 > self._gram.shape[0]:
            big = np.zeros((2 * self._gram.shape[0], 2 * self._gram.shape[0]))
            big[:m, :m] = self._gram[:m, :m]
            self._gram = big
        L = self._inc_len
        if m:
            mask = np.zeros(self.n, dtype=bool)
            mask[sup] = True
            hit = mask[self._inc_v[:L]]
            row = np.bincount(self._inc_c[:L][hit], minlength=m).astype(float)
            self._gram[m, :m] = row
            self._gram[:m, m] = row
        self._gram[m, m] = float(sup.size)
        while L + sup.size > self._inc_v.size:
            self._inc_v = np.concatenate([self._inc_v, np.empty_like(self._inc_v)])
            self._inc_c = np.concatenate([self._inc_c, np.empty_like(self._inc_c)])
        self._inc_v[L:L + sup.size] = sup
        self._inc_c[L:L + sup.size] = m
        self._inc_len = L + sup.size
        self.curves.append(curve)
        self.supports.append(sup)
        self.keys.add(k)
        return True

    def prune(self, keep: np.ndarray) -> np.ndarray:
        """Compact to the curves flagged in ``keep``; returns the old-index
        to new-index map with -1 for removed curves.  Removed keys are
        forgotten so the oracle may reintroduce those curves later."""
        idxs = np.nonzero(keep)[0]
        remap = np.full(len(self.curves), -1, dtype=np.int64)
        remap[idxs] = np.arange(idxs.size)
        self.curves = [self.curves[i] for i in idxs]
        self.supports = [self.supports[i] for i in idxs]
        self.keys = {c.key() for c in self.curves}
        cap = 16
        while cap < 2 * (idxs.size + 1):
            cap *= 2
        fresh = np.zeros((cap, cap))
        fresh[:idxs.size, :idxs.size] = self._gram[np.ix_(idxs, idxs)]
        self._gram = fresh
        L = self._inc_len
        sel = keep[self._inc_c[:L]]
        vs = self._inc_v[:L][sel]
        cs = remap[self._inc_c[:L][sel]]
        self._inc_v[:vs.size] = vs
        self._inc_c[:cs.size] = cs
        self._inc_len = int(vs.size)
        if self.factor is not None:
            self.factor.G = self.gram
            self.factor.act = [int(remap[j]) for j in self.factor.act
                               if remap[j] >= 0]
            self.factor._idx = None
            self.factor.rebuild()
        return remap

    def weight_sum(self, lam: np.ndarray) -> np.ndarray:
        L = self._inc_len
        return np.bincount(self._inc_v[:L], weights=lam[self._inc_c[:L]],
                           minlength=self.n)

    def lengths(self, rho: np.ndarray) -> np.ndarray:
        L = self._inc_len
        return np.bincount(self._inc_c[:L], weights=rho[self._inc_v[:L]],
                           minlength=len(self.curves))


class _ActiveFactor:
    """Cholesky factor of the Gram restricted to an ordered active list,
    updated in O(k^2) as single curves enter and leave."""

    def __init__(self, G: np.ndarray, idx):
        self.G = G
        self.act: list[int] = []
        self.changes = 0
        self._idx = None
        cap = max(16, 2 * (len(idx) + 1))
        self._F = np.zeros((cap, cap))
        for j in idx:
            self.add(int(j))

    def __len__(self):
        return len(self.act)

    def indices(self) -> np.ndarray:
        if self._idx is None:
            self._idx = np.asarray(self.act, dtype=np.int64)
        return self._idx

    def add(self, j: int) -> None:
        k = len(self.act)
        if k + 1 > self._F.shape[0]:
            big = np.zeros((2 * self._F.shape[0], 2 * self._F.shape[0]))
            big[:k, :k] = self._F[:k, :k]
            self._F = big
        c = self.G[self.indices(), j] if k else np.zeros(0)
        chol_insert(self._F, k, np.ascontiguousarray(c), float(self.G[j, j]))
        self.act.append(j)
        self._idx = None
        self.changes += 1

    def drop(self, pos: int) -> None:
        chol_delete(self._F, len(self.act), pos)
        del self.act[pos]
        self._idx = None
        self.changes += 1

    def solve(self, b: np.ndarray) -> np.ndarray:
        return chol_solve(self._F, len(self.act), b)

    def rebuild(self) -> None:
        """Refactor from the Gram itself, clearing accumulated drift."""
        k = len(self.act)
        idx = self.indices()
        if k:
            A = self.G[np.ix_(idx, idx)]
            try:
                R = np.linalg.cholesky(A).T
            except np.linalg.LinAlgError:
                # semidefinite case: bordered inserts floor the diagonal
                act, self.act = self.act, []
                self._idx = None
                for j in act:
                    self.add(j)
                self.changes = 0
                return
            if k > self._F.shape[0]:
                cap = self._F.shape[0]
                while cap < k + 1:
                    cap *= 2
                self._F = np.zeros((cap, cap))
            self._F[:] = 0.0
            self._F[:k, :k] = R
        self.changes = 0

    def sync(self, passive: np.ndarray) -> None:
        """Align the factor's index list with a passivity mask."""
        for pos in range(len(self.act) - 1, -1, -1):
            if not passive[self.act[pos]]:
                self.drop(pos)
        have = set(self.act)
        for j in np.nonzero(passive)[0]:
            if int(j) not in have:
                self.add(int(j))


def _solve_q2(ws: _WorkingSet, lam0: np.ndarray, opts: SolverOptions):
    """Active-set solver for min 1/4 l'Gl - sum l over l >= 0.

    The gradient component (Gl)_i/2 - 1 is the working curve's length
    minus one, so complementarity is exactly the certificate condition.
    """
    G = ws.gram
    m = G.shape[0]
    lam = np.maximum(lam0, 0.0)
    passive = lam > 0.0
    if ws.factor is not None:
        # degenerate actives (multiplier exactly zero) stay in the factor,
        # otherwise they would be dropped and re-entered every call
        fac = ws.factor
        fac.G = G
        if fac.act:
            passive[np.asarray(fac.act, dtype=np.int64)] = True
        if not passive.any():
            passive[int(np.argmin(np.diag(G)))] = True
        fac.sync(passive)
    else:
        if not passive.any():
            passive[int(np.argmin(np.diag(G)))] = True
        ws.factor = _ActiveFactor(G, np.nonzero(passive)[0])
        fac = ws.factor
    enter = 8
    last_clean = None
    limit = 4 * m + 40
    for it in range(1, limit + 1):
        if fac.changes > max(256, 2 * len(fac.act)):
            fac.rebuild()
        idx = fac.indices()
        x = fac.solve(np.full(idx.size, 2.0))
        if x.size and x.min() < -1e-13:
            # step toward the equality solution, dropping the first
            # variable that hits zero
            cur = lam[idx]
            neg = np.nonzero(x < -1e-13)[0]
            alphas = cur[neg] / (cur[neg] - x[neg])
            p = int(np.argmin(alphas))
            j = int(neg[p])
            t = min(max(float(alphas[p]), 0.0), 1.0)
            lam[idx] = cur + t * (x - cur)
            lam[idx[j]] = 0.0
            passive[idx[j]] = False
            fac.drop(j)
            if not passive.any():
                j0 = int(np.argmin(np.diag(G)))
                passive[j0] = True
                fac.add(j0)
            continue
        lam[:] = 0.0
        lam[idx] = np.maximum(x, 0.0)
        # (G lam)_j is the rho-length of curve j for the weight profile of
        # lam, so the gradient comes off the incidence arrays in O(nnz)
        grad = 0.5 * ws.lengths(ws.weight_sum(lam)) - 1.0
        blocked = (~passive) & (grad < -opts.tol)
        if not blocked.any():
            # polish on the exact subsystem so factor drift never leaks
            # into the returned multipliers
            A = G[np.ix_(idx, idx)]
            b = np.full(idx.size, 2.0)
            try:
                xp = np.linalg.solve(A, b)
            except np.linalg.LinAlgError:
                xp = np.linalg.lstsq(A, b, rcond=None)[0]
            if xp.size and float(np.max(np.abs(xp - x))) > 1e-7:
                fac.rebuild()
            if xp.size == 0 or float(xp.min()) > -1e-13:
                lam[:] = 0.0
                lam[idx] = np.maximum(xp, 0.0)
                grad = 0.5 * ws.lengths(ws.weight_sum(lam)) - 1.0
            kkt = float(np.max(np.abs(lam * grad))) if m else 0.0
            return lam, kkt, it, True
        # enter several violated curves per round; if the active set ever
        # repeats without progress, revert to provably finite single entry
        key = passive.tobytes()
        if key == last_clean:
            enter = 1
        last_clean = key
        cand = np.nonzero(blocked)[0]
        order = np.argsort(grad[cand], kind="stable")
        for j in cand[order[:enter]]:
            passive[int(j)] = True
            fac.add(int(j))
    grad = 0.5 * ws.lengths(ws.weight_sum(lam)) - 1.0
    return lam, float(np.max(np.abs(lam * grad))), limit, False


def _solve_general(ws: _WorkingSet, lam0: np.ndarray, Q: float, opts: SolverOptions):
    """Projected gradient ascent on the dual of the Q-volume program.

    For weights w = sum of lambda over curves through a vertex the dual is
    sum lambda - (1 - 1/Q) Q^{-1/(Q-1)} sum w^{Q/(Q-1)}, maximized over
    lambda >= 0; rho = (w/Q)^{1/(Q-1)} recovers the metric.
    """
    m = len(ws)
    ex = Q / (Q - 1.0)
    cof = (1.0 - 1.0 / Q) * Q ** (-1.0 / (Q - 1.0))

    def value_grad(lam):
        w = ws.weight_sum(lam)
        rho = (w / Q) ** (1.0 / (Q - 1.0))
        val = float(lam.sum() - cof * np.sum(w ** ex))
        grad = 1.0 - ws.lengths(rho)
        return val, grad, rho

    lam = np.maximum(lam0, 0.0)
    if not lam.any():
        lam[:] = 1.0 / max(1, m)
    val, grad, rho = value_grad(lam)
    step = 1.0
    it = 0
    for it in range(1, opts.inner_max_iter + 1):
        kkt = float(np.max(np.abs(lam - np.maximum(lam + grad, 0.0)))) if m else 0.0
        if kkt <= opts.tol:
            return lam, kkt, it, True
        accepted = False
        for _ in range(60):
            cand = np.maximum(lam + step * grad, 0.0)
            cval, cgrad, crho = value_grad(cand)
            d = cand - lam
            if cval >= val + 1e-4 * float(grad @ d) - 1e-18:
                lam, val, grad, rho = cand, cval, cgrad, crho
                step *= 1.3
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    kkt = float(np.max(np.abs(lam - np.maximum(lam + grad, 0.0)))) if m else 0.0
    return lam, kkt, it, kkt <= max(opts.tol * 100, 1e-7)


def _recover_rho(ws: _WorkingSet, lam: np.ndarray, Q: float) -> np.ndarray:
    w = ws.weight_sum(lam)
    if Q == 2.0:
        return 0.5 * w
    return (w / Q) ** (1.0 / (Q - 1.0))


# ------------------------------------------------------------- solver


def modulus(g: Graph, family: CurveFamily, Q: float = 2.0,
            opts: SolverOptions | None = None) -> ModulusResult:
    """Modulus of a curve family with an extremality certificate.

    Q must exceed 1: the certificate construction divides by Q - 1 and the
    linear case has no unique extremal metric.
    """
    if not (Q > 1.0) or not math.isfinite(Q):
        raise ValueError("Q must be a finite number greater than 1")
    opts = opts or SolverOptions()
    family.validate(g)
    max_outer = opts.max_outer if opts.max_outer is not None else 10 * g.n

    ell0, first = shortest_curve(g, family, np.ones(g.n))
    if first is None:
        return ModulusResult(
            modulus=0.0, rho=np.zeros(g.n), Q=Q, active_curves=(),
            multipliers=np.zeros(0), kkt_residual=0.0, min_length=math.inf,
            iterations=0, certified=True, message="empty family")

    ws = _WorkingSet(g.n)
    ws.add(first)
    lam = np.zeros(1)
    born = np.zeros(1, dtype=np.int64)
    certified = False
    message = ""
    outer = 0
    rho = np.ones(g.n)
    stalled = None
    while outer < max_outer:
        outer += 1
        lam, kkt, _, inner_ok = (
            _solve_q2(ws, lam, opts) if Q == 2.0
            else _solve_general(ws, lam, Q, opts))
        rho = _recover_rho(ws, lam, Q)
        if len(ws) > 512 and outer % 16 == 0:
            # retire curves that sit at zero multiplier, degenerate actives
            # included; the oracle hands any of them back if they become
            # violated again
            keep = (lam > 0.0) | (born > outer - 8)
            if int(np.count_nonzero(keep)) < len(ws):
                ws.prune(keep)
                lam = lam[keep]
                born = born[keep]
        ell, cur = shortest_curve(g, family, rho)
        if ell >= 1.0 - opts.sep_tol:
            certified = inner_ok
            if not inner_ok:
                message = "inner solver did not converge"
            break
        if cur is None:
            raise RuntimeError("oracle lost the family mid-solve")
        added = 0
        for c in [cur] + _violated_extras(g, family, rho, 1.0 - opts.sep_tol,
                                          opts.batch_curves):
            if ws.add(c):
                added += 1
        if added == 0:
            if stalled == cur.key():
                certified = False
                message = "oracle repeated a working curve; constraints cannot be met"
                break
            stalled = cur.key()
            continue
        stalled = None
        lam = np.append(lam, np.zeros(added))
        born = np.append(born, np.full(added, outer, dtype=np.int64))
    else:
        message = f"stopped at the outer iteration cap ({max_outer})"

    # normalize to unit shortest length so volume reads off the modulus
    ell, _ = shortest_curve(g, family, rho)
    if ell <= 0.0 or not math.isfinite(ell):
        # truncated run left a zero-length curve; no admissible rescale
        return ModulusResult(
            modulus=math.inf, rho=rho, Q=Q, active_curves=tuple(ws.curves),
            multipliers=lam, kkt_residual=math.inf, min_length=float(ell),
            iterations=outer, certified=False,
            message=message or "metric not admissible for the full family")
    rho = rho / ell
    lam = lam / ell ** (Q - 1.0)
    lengths = ws.lengths(rho)
    comp = float(np.max(np.abs(lam * (lengths - 1.0)))) if len(ws) else 0.0
    min_len, _ = shortest_curve(g, family, rho)
    certified = certified and comp <= opts.cert_tol and min_len >= 1.0 - 2 * opts.sep_tol
    keep = lam > 0.0
    return ModulusResult(
        modulus=q_volume(rho, Q),
        rho=rho,
        Q=Q,
        active_curves=tuple(c for c, k in zip(ws.curves, keep) if k),
        multipliers=lam[keep],
        kkt_residual=comp,
        min_length=float(min_len),
        iterations=outer,
        certified=certified,
        message=message,
    )


def modulus_condenser(g: Graph, E, F, Q: float = 2.0,
                      opts: SolverOptions | None = None) -> ModulusResult:
    """Modulus of the family of curves joining E to F."""
    return modulus(g, CurveFamily.connect(E, F), Q=Q, opts=opts)


# -------------------------------------------------------- certificates


@dataclass
class BeurlingReport:
    valid: bool
    stationarity_residual: float
    min_length: float
    tight_curves: tuple[Curve, ...]
    multipliers: np.ndarray
    truncated: bool = False
    reasons: list[str] = field(default_factory=list)


def _tight_connect_curves(g: Graph, cond: Condenser, rho, tol, cap):
    """All curves of length within tol of the shortest, via the DAG of
    distance-tight steps.  Returns (curves, truncated)."""
    dist, hops = _dijkstra(g, rho, cond.F)
    best = min(float(dist[u]) for u in cond.E)
    slack = tol * max(1.0, best)
    out = []
    truncated = False
    Fset = set(cond.F)
    starts = sorted(u for u in cond.E if float(dist[u]) <= best + slack)
    stack = [[s] for s in reversed(starts)]
    while stack:
        path = stack.pop()
        cur = path[-1]
        if cur in Fset:
            out.append(Curve(tuple(path)))
            if len(out) >= cap:
                truncated = True
                break
            continue
        for w in sorted(int(x) for x in g.neighbors(cur)):
            if w in path:
                continue
            if dist[w] + rho[cur] <= dist[cur] + slack:
                stack.append(path + [w])
    return out, truncated


def beurling_check(g: Graph, family: CurveFamily, rho, Q: float = 2.0,
                   tol: float = 1e-7, max_curves: int = 20000) -> BeurlingReport:
    """Extremality certificate for a claimed metric.

    The metric is extremal for its family exactly when the unit-length
    curves admit nonnegative weights whose indicator sum reproduces
    Q rho^{Q-1} at every vertex.  The tight curves are enumerated (connect
    families walk the tight-step DAG; explicit families filter by length)
    and the weights come from a nonnegative least squares fit.
    """
    from scipy.optimize import nnls

    rho = _as_rho(g, rho)
    reasons = []
    ell, _ = shortest_curve(g, family, rho)
    if not math.isfinite(ell) or ell <= 0:
        return BeurlingReport(False, math.inf, float(ell), (), np.zeros(0),
                              reasons=["degenerate shortest length"])
    truncated = False
    if family.kind == "explicit":
        tight = [c for c in family.curves
                 if rho_length(c, rho) <= ell * (1 + tol)]
    elif family.kind == "connect":
        tight, truncated = _tight_connect_curves(g, family.condenser, rho, tol, max_curves)
    else:
        from .surface import tight_separating_cycles

        tight, truncated = tight_separating_cycles(family.annulus, rho, tol, max_curves)
    if not tight:
        return BeurlingReport(False, math.inf, float(ell), (), np.zeros(0),
                              reasons=["no tight curves found"])

    # certificate is scale free: work with the unit-shortest normalization
    rn = rho / ell
    target = Q * rn ** (Q - 1.0)
    A = np.zeros((g.n, len(tight)))
    for j, c in enumerate(tight):
        for v in c.vertices:
            A[v, j] += 1.0
    lam, _ = nnls(A, target)
    resid = float(np.max(np.abs(A @ lam - target)))
    ok = resid <= max(100 * tol, 1e-6) * max(1.0, float(target.max()))
    if not ok:
        reasons.append(f"stationarity residual {resid:.3g}")
    if truncated:
        reasons.append("tight curve enumeration hit the cap")
    keep = lam > 0
    return BeurlingReport(
        valid=ok and not truncated,
        stationarity_residual=resid,
        min_length=float(ell),
        tight_curves=tuple(c for c, k in zip(tight, keep) if k),
        multipliers=lam[keep],
        truncated=truncated,
        reasons=reasons,
    )


# ---------------------------------------------------- comparison audits


@dataclass
class ComparisonReport:
    modulus_1: float
    modulus_2: float
    constant: float
    upper_ok: bool
    lower_ok: bool
    detail: str = ""


def _ball_sizes(g: Graph, k: int) -> int:
    from .graphs import bfs_distances

    worst = 0
    for v in range(g.n):
        dist = bfs_distances(g, [v])
        worst = max(worst, int(np.count_nonzero((dist >= 0) & (dist <= k))))
    return worst


def compare_equivalent_graphs(g1: Graph, fam1: CurveFamily,
                              g2: Graph, fam2: CurveFamily,
                              k: int, Q: float = 2.0,
                              opts: SolverOptions | None = None) -> ComparisonReport:
    """Moduli of matched families on two graphs over the same vertex set
    whose metrics agree to within a factor k stay within N^(Q+1) of each
    other, N the largest combinatorial k-ball.  Computes both sides and
    checks the two-sided bound."""
    if g1.n != g2.n:
        raise ValueError("graphs must share their vertex set")
    N = max(_ball_sizes(g1, k), _ball_sizes(g2, k))
    C = float(N) ** (Q + 1.0)
    m1 = modulus(g1, fam1, Q=Q, opts=opts).modulus
    m2 = modulus(g2, fam2, Q=Q, opts=opts).modulus
    return ComparisonReport(
        modulus_1=m1, modulus_2=m2, constant=C,
        upper_ok=m1 <= C * m2 * (1 + 1e-9) + 1e-12,
        lower_ok=m2 <= C * m1 * (1 + 1e-9) + 1e-12,
        detail=f"N={N}",
    )


def covering_overlap_compare(g1: Graph, fam1: CurveFamily,
                             g2: Graph, fam2: CurveFamily,
                             K: float, Q: float = 2.0,
                             opts: SolverOptions | None = None) -> ComparisonReport:
    """Two nerves of coverings of one space with bounded overlap K carry
    matched families whose moduli agree to within K^(Q+1)."""
    C = float(K) ** (Q + 1.0)
    m1 = modulus(g1, fam1, Q=Q, opts=opts).modulus
    m2 = modulus(g2, fam2, Q=Q, opts=opts).modulus
    return ComparisonReport(
        modulus_1=m1, modulus_2=m2, constant=C,
        upper_ok=m1 <= C * m2 * (1 + 1e-9) + 1e-12,
        lower_ok=m2 <= C * m1 * (1 + 1e-9) + 1e-12,
        detail=f"K={K}",
    )
