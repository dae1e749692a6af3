"""Graphs, Euclidean embeddings, and power-of-distance edge weights.

Conventions used throughout the package:
  * edges are stored canonically as (u, v) with u < v, sorted;
  * "total pair weight" sums over ORDERED vertex pairs, so every unordered
    pair is counted twice (edge sums stay unordered);
  * weights below 1e-14 are kept, never pruned.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .util import CapExceeded, make_rng

FAMILY_VERTEX_CAP = 4096


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    max_degree: int

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1.0
        return a

    def neighbors(self) -> list[list[int]]:
        nbr: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbr[u].append(v)
            nbr[v].append(u)
        return nbr


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate and canonicalize an edge list: simple graph, 0-indexed, u < v, sorted."""
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    seen: set[tuple[int, int]] = set()
    canon: list[tuple[int, int]] = []
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if u == v:
            raise ValueError(f"self-loop rejected: ({u}, {v})")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"vertex index out of range for n={n}: ({u}, {v})")
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise ValueError(f"duplicate edge rejected: {e}")
        seen.add(e)
        canon.append(e)
    canon.sort()
    g = Graph(n=n, edges=tuple(canon), max_degree=0)
    deg = g.degrees()
    max_deg = int(deg.max()) if n > 0 else 0
    return Graph(n=n, edges=g.edges, max_degree=max_deg)


def connected_components(g: Graph) -> list[list[int]]:
    nbr = g.neighbors()
    seen = [False] * g.n
    comps: list[list[int]] = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in nbr[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


@dataclass(frozen=True, eq=False)
class Embedding:
    n: int
    dim: int
    points: np.ndarray  # shape (n, dim)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape != (self.n, self.dim):
            raise ValueError(f"points must have shape ({self.n}, {self.dim}), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("embedding coordinates must be finite")
        object.__setattr__(self, "points", pts)


def make_embedding(points) -> Embedding:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return Embedding(n=pts.shape[0], dim=pts.shape[1], points=pts)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    graph: Graph
    weights: np.ndarray  # one weight per canonical edge
    q: float = 2.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.graph.m,):
            raise ValueError(f"need one weight per edge, got shape {w.shape} for m={self.graph.m}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    def total_edge_weight(self) -> float:
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class FractionalMatching:
    values: np.ndarray  # h(e) in [0,1] per canonical edge
    total_weight: float


@dataclass(frozen=True, eq=False)
class VertexCover:
    values: np.ndarray  # g(u) >= 0 per vertex
    total: float


def edge_norms(g: Graph, f: Embedding) -> np.ndarray:
    if f.n != g.n:
        raise ValueError(f"embedding has {f.n} points but graph has {g.n} vertices")
    if g.m == 0:
        return np.zeros(0)
    e = np.asarray(g.edges, dtype=np.int64)
    diffs = f.points[e[:, 0]] - f.points[e[:, 1]]
    return np.linalg.norm(diffs, axis=1)


def weights_from_embedding(g: Graph, f: Embedding, q: float) -> WeightedGraph:
    """Edge weights ||f(u) - f(v)||^q on the canonical edge list."""
    if q < 1:
        raise ValueError(f"exponent q must be >= 1, got {q}")
    return WeightedGraph(graph=g, weights=edge_norms(g, f) ** q, q=float(q))


def pairwise_sq_dists(points: np.ndarray) -> np.ndarray:
    """Dense n x n matrix of squared Euclidean distances (Gram identity, clipped at 0)."""
    sq = np.einsum("ij,ij->i", points, points)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.clip(d2, 0.0, None, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def total_pair_weight(f: Embedding, q: float) -> float:
    """Sum of ||f(u) - f(v)||^q over ORDERED pairs (u, v)."""
    if q < 1:
        raise ValueError(f"exponent q must be >= 1, got {q}")
    d2 = pairwise_sq_dists(f.points)
    if q == 2.0:
        return float(d2.sum())
    return float((d2 ** (q / 2.0)).sum())


def all_pair_weights(f: Embedding, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Condensed upper-triangle (u < v) pair list and their ||.||^q weights."""
    iu = np.triu_indices(f.n, k=1)
    d2 = pairwise_sq_dists(f.points)[iu]
    w = d2 if q == 2.0 else d2 ** (q / 2.0)
    pairs = np.stack(iu, axis=1)
    return pairs, w


def center_embedding(f: Embedding) -> Embedding:
    """Translate so the point sum is zero; pairwise distances are unchanged."""
    return Embedding(n=f.n, dim=f.dim, points=f.points - f.points.mean(axis=0, keepdims=True))


def gen_star_union(delta: int, k: int) -> tuple[Graph, Embedding]:
    """k disjoint stars, each one hub with `delta` leaves; vertex v embeds as basis vector e_v."""
    if delta < 1 or k < 1:
        raise ValueError("need delta >= 1 and k >= 1")
    n = k * (delta + 1)
    edges = []
    for s in range(k):
        hub = s * (delta + 1)
        for leaf in range(1, delta + 1):
            edges.append((hub, hub + leaf))
    g = build_graph(n, edges)
    return g, Embedding(n=n, dim=n, points=np.eye(n))


def gen_family(kind: str, size: int) -> Graph:
    """Named test instances. For `hypercube`, `size` is the cube dimension."""
    if kind == "path":
        n = size
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        n = size
        if n < 3:
            raise ValueError("cycle needs size >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif kind == "complete":
        n = size
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif kind == "hypercube":
        n = 1 << size
        edges = [(v, v | (1 << b)) for v in range(n) for b in range(size) if not v & (1 << b)]
    else:
        raise ValueError(f"unknown graph family: {kind!r}")
    if n > FAMILY_VERTEX_CAP:
        raise CapExceeded(f"family instance has {n} vertices; cap is {FAMILY_VERTEX_CAP}")
    return build_graph(n, edges)


def gaussian_cloud(n: int, dim: int, seed: int) -> Embedding:
    rng = make_rng(seed)
    return Embedding(n=n, dim=dim, points=rng.normal(size=(n, dim)))


# --- file formats -----------------------------------------------------------
# Graph: first line "n m", then m lines "u v" (0-indexed).
# Embedding: CSV, row v = coordinates of f(v), 17 significant digits.


def write_graph(g: Graph, path: str | Path) -> None:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph(path: str | Path) -> Graph:
    tokens = Path(path).read_text().split()
    if len(tokens) < 2:
        raise ValueError(f"graph file {path} is malformed: missing header")
    n, m = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * m:
        raise ValueError(f"graph file {path} promises {m} edges but has {(len(tokens) - 2) // 2}")
    edges = [(int(tokens[2 + 2 * i]), int(tokens[3 + 2 * i])) for i in range(m)]
    return build_graph(n, edges)


def write_embedding(f: Embedding, path: str | Path) -> None:
    lines = [",".join(format(x, ".17g") for x in row) for row in f.points]
    Path(path).write_text("\n".join(lines) + "\n")


def read_embedding(path: str | Path) -> Embedding:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            rows.append([float(x) for x in line.split(",")])
    if not rows:
        raise ValueError(f"embedding file {path} is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"embedding file {path} has ragged rows")
    return make_embedding(rows)
