"""Fractional matching LP (primal + dual vertex cover), exact maximum-weight
matching at desk scale, and a half-integral enumeration oracle.

The edge-capacity bound h(e) <= 1 is implied by the vertex constraints, so the
primal LP solved here is max w.h s.t. (incidence).h <= 1, h >= 0, whose dual is
exactly the vertex-cover program min sum g s.t. g(u)+g(v) >= w(u,v), g >= 0.
One tableau solve yields both sides: the dual values are read off the slack
columns of the optimal objective row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import FractionalMatching, Graph, VertexCover, WeightedGraph, connected_components
from .util import CapExceeded, NumericalFailure

LP_EDGE_CAP = 100_000
ORACLE_EDGE_CAP = 13
BB_EDGE_CAP = 40
BB_LOW_DEGREE_EDGE_CAP = 20_000

REDUCED_COST_TOL = 1e-9
DUALITY_REL_TOL = 1e-8
DEGENERATE_PIVOT_LIMIT = 50


@dataclass(frozen=True)
class LPSolveReport:
    primal: float
    dual: float
    iterations: int
    status: str  # "optimal" | "infeasibleNumerics"

    def to_dict(self) -> dict:
        return {"primal": self.primal, "dual": self.dual, "iterations": self.iterations, "status": self.status}


def _simplex_max(a: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = REDUCED_COST_TOL):
    """Dense primal simplex for max c.x s.t. a.x <= b, x >= 0 with b >= 0.

    Entering rule: most negative reduced cost, lowest index on ties; after
    DEGENERATE_PIVOT_LIMIT consecutive degenerate pivots, Bland's rule takes
    over permanently (anti-cycling). Returns (x, y, iterations, ok) where y is
    the dual vector read from the slack columns.
    """
    m, n = a.shape
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, :n] = -c
    basis = list(range(n, n + m))
    bland = False
    degenerate_run = 0
    iterations = 0
    max_iterations = 1000 + 50 * (m + n)

    while True:
        obj = t[m, :-1]
        if bland:
            negative = np.nonzero(obj < -tol)[0]
            if negative.size == 0:
                break
            col = int(negative[0])
        else:
            col = int(np.argmin(obj))  # argmin takes the lowest index on ties
            if obj[col] >= -tol:
                break
        column = t[:m, col]
        positive = column > tol
        if not positive.any():
            return None, None, iterations, False  # unbounded: impossible for this LP unless numerics broke
        ratios = np.full(m, np.inf)
        ratios[positive] = t[:m, -1][positive] / column[positive]
        row = int(np.argmin(ratios))
        if bland:
            near = np.nonzero(ratios <= ratios[row] * (1 + 1e-12) + 1e-300)[0]
            row = int(min(near, key=lambda i: basis[i]))
        iterations += 1
        if iterations > max_iterations:
            return None, None, iterations, False
        degenerate_run = degenerate_run + 1 if ratios[row] <= tol else 0
        if degenerate_run > DEGENERATE_PIVOT_LIMIT:
            bland = True
        pivot = t[row, col]
        t[row, :] /= pivot
        others = np.arange(m + 1) != row
        t[others, :] -= np.outer(t[others, col], t[row, :])
        t[others, col] = 0.0
        basis[row] = col

    x = np.zeros(n + m)
    for i, bi in enumerate(basis):
        x[bi] = t[i, -1]
    y = t[m, n:n + m].copy()
    return x[:n], y, iterations, True


def _incidence(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.m))
    for j, (u, v) in enumerate(g.edges):
        a[u, j] = 1.0
        a[v, j] = 1.0
    return a


def _solve_matching_lp(w: WeightedGraph):
    g = w.graph
    if g.m > LP_EDGE_CAP:
        raise CapExceeded(f"matching LP cap is {LP_EDGE_CAP} edges, got {g.m}")
    if g.m == 0:
        return np.zeros(0), np.zeros(g.n), LPSolveReport(0.0, 0.0, 0, "optimal")
    x, y, iterations, ok = _simplex_max(_incidence(g), np.ones(g.n), w.weights)
    if not ok:
        return None, None, LPSolveReport(float("nan"), float("nan"), iterations, "infeasibleNumerics")
    h = np.clip(x, 0.0, 1.0)
    cover = np.clip(y, 0.0, None)
    primal = float(h @ w.weights)
    dual = float(cover.sum())
    status = "optimal" if abs(primal - dual) <= DUALITY_REL_TOL * (1 + abs(primal)) else "infeasibleNumerics"
    return h, cover, LPSolveReport(primal, dual, iterations, status)


def fractional_matching(w: WeightedGraph) -> tuple[FractionalMatching, LPSolveReport]:
    """Maximum-weight fractional matching: h(e) in [0,1], sum_{e at v} h(e) <= 1."""
    h, _, report = _solve_matching_lp(w)
    if h is None:
        raise NumericalFailure("fractional matching LP did not certify optimality")
    return FractionalMatching(values=h, total_weight=report.primal), report


def min_vertex_cover_lp(w: WeightedGraph) -> tuple[VertexCover, LPSolveReport]:
    """LP dual of the fractional matching: min sum g(u) s.t. g(u)+g(v) >= w(u,v), g >= 0."""
    _, cover, report = _solve_matching_lp(w)
    if cover is None:
        raise NumericalFailure("vertex cover LP did not certify optimality")
    return VertexCover(values=cover, total=report.dual), report


def fractional_matching_oracle(w: WeightedGraph) -> float:
    """Exact optimum by enumerating all half-integral h in {0, 1/2, 1}^E.

    Valid because extreme points of the fractional matching polytope are
    half-integral. Independent of the simplex path.
    """
    g = w.graph
    if g.m > ORACLE_EDGE_CAP:
        raise CapExceeded(f"enumeration oracle cap is {ORACLE_EDGE_CAP} edges, got {g.m}")
    if g.m == 0:
        return 0.0
    inc = _incidence(g).astype(np.int64)  # n x m
    powers = 3 ** np.arange(g.m, dtype=np.int64)
    best = 0.0
    total = 3 ** g.m
    chunk = 200_000
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        halves = (idx[:, None] // powers[None, :]) % 3  # h in units of 1/2
        feasible = (halves @ inc.T <= 2).all(axis=1)
        if feasible.any():
            values = (halves[feasible] @ w.weights) * 0.5
            best = max(best, float(values.max()))
    return best


# --- exact maximum-weight matching ------------------------------------------


def _tree_max_matching(edges: list[tuple[int, int]], weights: np.ndarray, vertices: list[int]):
    """Exact maximum-weight matching on a tree component by post-order DP."""
    index = {v: i for i, v in enumerate(vertices)}
    nbr: list[list[tuple[int, int]]] = [[] for _ in vertices]  # (neighbor local id, edge id)
    for eid, (u, v) in enumerate(edges):
        nbr[index[u]].append((index[v], eid))
        nbr[index[v]].append((index[u], eid))
    nv = len(vertices)
    dp_free = np.zeros(nv)      # v unmatched within its subtree
    dp_matched = np.zeros(nv)   # v matched to one of its children
    choice = [-1] * nv          # edge id chosen by dp_matched
    parent = [-1] * nv
    order = []
    stack = [0]
    seen = [False] * nv
    seen[0] = True
    while stack:
        u = stack.pop()
        order.append(u)
        for v, _ in nbr[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                stack.append(v)
    for u in reversed(order):
        children = [(v, eid) for v, eid in nbr[u] if parent[v] == u]
        base = sum(max(dp_free[v], dp_matched[v]) for v, _ in children)
        dp_free[u] = base
        best_gain, best_eid = 0.0, -1
        for v, eid in children:
            gain = weights[eid] + dp_free[v] - max(dp_free[v], dp_matched[v])
            if gain > best_gain:
                best_gain, best_eid = gain, eid
        dp_matched[u] = base + best_gain
        choice[u] = best_eid
    # reconstruct: walk down deciding matched/free per node
    chosen: list[int] = []
    take_matched = [dp_matched[u] > dp_free[u] for u in range(nv)]
    stack2 = [(0, True)]  # (node, allowed to match downward)
    while stack2:
        u, allowed = stack2.pop()
        matched_child = -1
        if allowed and take_matched[u] and choice[u] >= 0:
            chosen.append(choice[u])
            a, b = edges[choice[u]]
            matched_child = index[a] if parent[index[a]] == u else index[b]
        for v, _eid in nbr[u]:
            if parent[v] == u:
                stack2.append((v, v != matched_child))
    return chosen, float(max(dp_free[0], dp_matched[0]))


def _bb_max_matching(edges: list[tuple[int, int]], weights: np.ndarray):
    """Branch-and-bound over edges in descending weight order, pruned with the
    fractional LP bound on the residual graph."""
    order = sorted(range(len(edges)), key=lambda i: (-weights[i], i))
    sorted_edges = [edges[i] for i in order]
    sorted_w = weights[np.array(order)] if len(order) else weights

    def greedy():
        used: set[int] = set()
        val = 0.0
        picked = []
        for i, (u, v) in enumerate(sorted_edges):
            if u not in used and v not in used:
                used.add(u)
                used.add(v)
                val += sorted_w[i]
                picked.append(i)
        return val, picked

    best_val, best_pick = greedy()
    suffix = np.concatenate([np.cumsum(sorted_w[::-1])[::-1], [0.0]]) if len(edges) else np.zeros(1)

    def lp_bound(idx: int, used: frozenset[int]) -> float:
        live = [(i, sorted_edges[i]) for i in range(idx, len(sorted_edges))
                if sorted_edges[i][0] not in used and sorted_edges[i][1] not in used]
        if not live:
            return 0.0
        verts = sorted({v for _, e in live for v in e})
        remap = {v: k for k, v in enumerate(verts)}
        sub_edges = [(remap[e[0]], remap[e[1]]) for _, e in live]
        sub_w = np.array([sorted_w[i] for i, _ in live])
        a = np.zeros((len(verts), len(live)))
        for j, (u, v) in enumerate(sub_edges):
            a[u, j] = a[v, j] = 1.0
        x, _, _, ok = _simplex_max(a, np.ones(len(verts)), sub_w)
        if not ok:
            return float(sub_w.sum())
        return float(np.clip(x, 0, 1) @ sub_w)

    n_edges = len(sorted_edges)
    stack = [(0, frozenset(), 0.0, ())]
    while stack:
        idx, used, val, picked = stack.pop()
        if val > best_val:
            best_val, best_pick = val, list(picked)
        if idx >= n_edges:
            continue
        if val + suffix[idx] <= best_val + 1e-12:
            continue
        if val + lp_bound(idx, used) <= best_val + 1e-12:
            continue
        u, v = sorted_edges[idx]
        # exclude branch pushed first so the include branch is explored first
        stack.append((idx + 1, used, val, picked))
        if u not in used and v not in used:
            stack.append((idx + 1, used | {u, v}, val + sorted_w[idx], picked + (idx,)))
    return [order[i] for i in best_pick], best_val


def max_matching_exact(w: WeightedGraph) -> tuple[list[tuple[int, int]], float]:
    """Exact maximum-weight matching; edge subset is returned in canonical order.

    Components are solved independently: forests by dynamic programming, the
    rest by branch-and-bound under desk-scale caps (<= 40 edges per component,
    or <= 20000 edges when the component's max degree is <= 3).
    """
    g = w.graph
    positive = [i for i in range(g.m) if w.weights[i] > 0]
    if not positive:
        return [], 0.0

    comp_of = {}
    for ci, comp in enumerate(connected_components(g)):
        for v in comp:
            comp_of[v] = ci
    by_comp: dict[int, list[int]] = {}
    for i in positive:
        by_comp.setdefault(comp_of[g.edges[i][0]], []).append(i)

    chosen: list[tuple[int, int]] = []
    for eids in by_comp.values():
        edges = [g.edges[i] for i in eids]
        weights = w.weights[np.array(eids)]
        verts = sorted({v for e in edges for v in e})
        deg: dict[int, int] = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        is_forest = len(edges) == len(verts) - 1  # connected component, so tree iff m = n-1
        if is_forest:
            local, _ = _tree_max_matching(edges, weights, verts)
        elif len(edges) <= BB_EDGE_CAP or (max(deg.values()) <= 3 and len(edges) <= BB_LOW_DEGREE_EDGE_CAP):
            local, _ = _bb_max_matching(edges, weights)
        else:
            raise CapExceeded(
                f"exact matcher cap: component with {len(edges)} edges, max degree {max(deg.values())}"
            )
        chosen += [edges[i] for i in local]

    used: set[int] = set()
    for u, v in chosen:
        if u in used or v in used:
            raise NumericalFailure("exact matcher produced a non-matching edge set")
        used.add(u)
        used.add(v)
    # re-sum in canonical edge order so equal matchings give bit-equal values
    index_of = {e: i for i, e in enumerate(g.edges)}
    chosen.sort()
    value = 0.0
    for e in chosen:
        value += float(w.weights[index_of[e]])
    _, lp_report = fractional_matching(w)
    if value > lp_report.primal + 1e-8 * (1 + abs(lp_report.primal)):
        raise NumericalFailure("exact matching value exceeds the fractional LP upper bound")
    return chosen, value
