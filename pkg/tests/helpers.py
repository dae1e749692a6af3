"""Independent oracles and corpus generators shared by the test modules.

Every oracle here deliberately avoids the code path it checks: brute-force
enumeration for matchings and conductance, numpy's LAPACK eigensolver for
spectra, closed forms and dense grids for the chain optimizers.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from fmmc_lab import Graph, WeightedGraph, build_graph


def random_corpus(count: int, seed: int, max_n: int = 12, max_m: int = 13):
    """Random simple graphs with i.i.d. uniform weights, sizes within the
    oracle caps (n <= 12, |E| <= 13)."""
    rng = np.random.default_rng(seed)
    corpus = []
    while len(corpus) < count:
        n = int(rng.integers(2, max_n + 1))
        all_edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
        m = int(rng.integers(1, min(max_m, len(all_edges)) + 1))
        idx = rng.choice(len(all_edges), size=m, replace=False)
        g = build_graph(n, [all_edges[i] for i in sorted(idx)])
        w = WeightedGraph(graph=g, weights=rng.uniform(0.0, 1.0, size=m))
        corpus.append(w)
    return corpus


def brute_max_matching(w: WeightedGraph) -> float:
    """Exact maximum-weight matching by enumerating all 2^m edge subsets."""
    g = w.graph
    masks = [(1 << u) | (1 << v) for u, v in g.edges]
    best = 0.0
    for subset in range(1 << g.m):
        used = 0
        val = 0.0
        ok = True
        s = subset
        while s:
            i = (s & -s).bit_length() - 1
            s &= s - 1
            if used & masks[i]:
                ok = False
                break
            used |= masks[i]
            val += w.weights[i]
        if ok and val > best:
            best = val
    return best


def brute_vertex_conductance(g: Graph) -> Fraction:
    best = None
    nbrs = [set() for _ in range(g.n)]
    for u, v in g.edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    for size in range(1, g.n // 2 + 1):
        for subset in combinations(range(g.n), size):
            inside = set(subset)
            boundary = set().union(*(nbrs[v] for v in subset)) - inside
            ratio = Fraction(len(boundary), size)
            if best is None or ratio < best:
                best = ratio
    return best


def chain_slem(entries: np.ndarray) -> float:
    """SLEM via numpy's eigensolver (independent of the package's Jacobi path)."""
    vals = np.sort(np.linalg.eigvalsh(entries))[::-1]
    return float(np.abs(vals[1:]).max()) if len(vals) > 1 else 0.0


def grid_gap_path3(step: float = 1e-3) -> float:
    """Best gap over chains on the 3-path by a dense 2-parameter grid."""
    p = np.arange(0.0, 1.0 + step / 2, step)
    p1, p2 = np.meshgrid(p, p, indexing="ij")
    keep = p1 + p2 <= 1.0 + 1e-12
    p1, p2 = p1[keep], p2[keep]
    mats = np.zeros((p1.size, 3, 3))
    mats[:, 0, 0] = 1 - p1
    mats[:, 0, 1] = mats[:, 1, 0] = p1
    mats[:, 1, 1] = 1 - p1 - p2
    mats[:, 1, 2] = mats[:, 2, 1] = p2
    mats[:, 2, 2] = 1 - p2
    vals = np.linalg.eigvalsh(mats)
    slem = np.maximum(np.abs(vals[:, 0]), np.abs(vals[:, 1]))
    return float((1.0 - slem).max())


def grid_gap_cycle4(step: float = 1e-3) -> float:
    """Best gap over chains on the 4-cycle with opposite edges tied (p, q)."""
    p = np.arange(0.0, 1.0 + step / 2, step)
    p1, p2 = np.meshgrid(p, p, indexing="ij")
    keep = p1 + p2 <= 1.0 + 1e-12
    p1, p2 = p1[keep], p2[keep]
    mats = np.zeros((p1.size, 4, 4))
    diag = 1 - p1 - p2
    for i in range(4):
        mats[:, i, i] = diag
    mats[:, 0, 1] = mats[:, 1, 0] = p1   # edges (0,1) and (2,3) carry p
    mats[:, 2, 3] = mats[:, 3, 2] = p1
    mats[:, 1, 2] = mats[:, 2, 1] = p2   # edges (1,2) and (0,3) carry q
    mats[:, 0, 3] = mats[:, 3, 0] = p2
    vals = np.linalg.eigvalsh(mats)
    slem = np.maximum(np.abs(vals[:, 0]), np.abs(vals[:, 2]))
    return float((1.0 - slem).max())


def grid_gap_edge(step: float = 1e-3) -> float:
    """Best gap over chains on a single edge (1-parameter grid)."""
    p = np.arange(0.0, 1.0 + step / 2, step)
    slem = np.abs(1.0 - 2.0 * p)
    return float((1.0 - slem).max())
