"""Seeded sub-Gaussian random projectors and their distortion diagnostics.

Two entry laws are supported, both centered with variance 1/d: gaussian
N(0, 1/d) and rademacher +-1/sqrt(d). A projector is a pure function of
(distribution, seed, d, n), so every experiment is replayable bit for bit.

The diagnostics mirror the accounting used to argue that projections preserve
matching numbers: edges whose projected weight exceeds e^{eps q} times the
original are "heavy", those that fall below e^{-eps q} are "light", and the
same light test over all vertex pairs gives "light pairs". The report sums
their excesses/costs and checks them against thresholds derived from the
empirical distortion rates (delta_hat, rho_hat); event_g is the conjunction of
the three threshold inequalities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Embedding, WeightedGraph, all_pair_weights, edge_norms
from .util import make_rng

GOODNESS_MIN_TRIALS = 100


@dataclass(frozen=True, eq=False)
class Projector:
    rows: int           # d
    cols: int           # n
    entries: np.ndarray
    distribution: str
    seed: int


def _sample_entries(n: int, d: int, distribution: str, seed: int) -> np.ndarray:
    rng = make_rng(seed)
    if distribution == "gaussian":
        return rng.normal(size=(d, n)) / np.sqrt(d)
    if distribution == "rademacher":
        return (2.0 * rng.integers(0, 2, size=(d, n)) - 1.0) / np.sqrt(d)
    raise ValueError(f"unknown projector distribution {distribution!r}")


def sample_projector(n: int, d: int, distribution: str, seed: int) -> Projector:
    """Realize a d x n projector; identical arguments give identical matrices."""
    if d < 1 or n < 1:
        raise ValueError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    return Projector(rows=d, cols=n, entries=_sample_entries(n, d, distribution, seed),
                     distribution=distribution, seed=int(seed))


def identity_projector(n: int) -> Projector:
    """Test hook: the identity map as a degenerate 'projection' to d = n."""
    return Projector(rows=n, cols=n, entries=np.eye(n), distribution="identity", seed=0)


def apply_projector(p: Projector, f: Embedding) -> Embedding:
    if p.cols != f.dim:
        raise ValueError(f"projector expects dimension {p.cols}, embedding has {f.dim}")
    return Embedding(n=f.n, dim=p.rows, points=f.points @ p.entries.T)


@dataclass(frozen=True)
class GoodnessEstimate:
    epsilon: float
    q: float
    trials: int
    delta_hat: float
    rho_hat: float
    delta_se: float
    rho_se: float

    @property
    def delta_ucb(self) -> float:
        """Upper confidence bound; rule-of-three floor keeps sqrt(delta) away from 0."""
        return max(self.delta_hat + 3.0 * self.delta_se, 3.0 / self.trials)

    @property
    def rho_ucb(self) -> float:
        # floor: an unobserved excess event (prob <= 3/trials) at the 2-eps distortion scale
        floor = (3.0 / self.trials) * (np.exp(2 * self.epsilon * self.q) - np.exp(self.epsilon * self.q))
        return max(self.rho_hat + 3.0 * self.rho_se, floor)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon, "q": self.q, "trials": self.trials,
            "delta_hat": self.delta_hat, "rho_hat": self.rho_hat,
            "delta_se": self.delta_se, "rho_se": self.rho_se,
            "delta_ucb": self.delta_ucb, "rho_ucb": self.rho_ucb,
        }


def estimate_goodness(distribution: str, n: int, d: int, eps: float, q: float,
                      trials: int, seed: int) -> GoodnessEstimate:
    """Monte-Carlo estimate of the two distortion rates of a random projector:

      delta_hat: frequency of ||pi(x) - pi(y)|| leaving the band e^{+-eps}||x - y||;
      rho_hat:   mean of the one-sided excess (ratio^q - e^{eps q}) when the
                 projected norm exceeds the upper band edge.

    The gaussian law is rotation invariant, so a single unit direction
    suffices; rademacher trials average over random unit directions.
    """
    if trials < GOODNESS_MIN_TRIALS:
        raise ValueError(f"need at least {GOODNESS_MIN_TRIALS} trials, got {trials}")
    if eps <= 0:
        raise ValueError(f"need eps > 0, got {eps}")
    if q < 1:
        raise ValueError(f"exponent q must be >= 1, got {q}")
    rng = make_rng(seed)
    if distribution == "gaussian":
        samples = rng.normal(size=(trials, d)) / np.sqrt(d)
        ratios = np.linalg.norm(samples, axis=1)
    elif distribution == "rademacher":
        ratios = np.empty(trials)
        chunk = max(1, min(trials, (1 << 22) // max(d * n, 1)))
        for start in range(0, trials, chunk):
            stop = min(start + chunk, trials)
            u = rng.normal(size=(stop - start, n))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            signs = (2.0 * rng.integers(0, 2, size=(stop - start, d, n)) - 1.0) / np.sqrt(d)
            ratios[start:stop] = np.linalg.norm(np.einsum("tdn,tn->td", signs, u), axis=1)
    else:
        raise ValueError(f"unknown projector distribution {distribution!r}")

    lo, hi = np.exp(-eps), np.exp(eps)
    failures = (ratios < lo) | (ratios > hi)
    delta_hat = float(failures.mean())
    delta_se = float(np.sqrt(delta_hat * (1.0 - delta_hat) / trials))
    excess = np.where(ratios >= hi, ratios ** q - np.exp(eps * q), 0.0)
    rho_hat = float(excess.mean())
    rho_se = float(excess.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return GoodnessEstimate(epsilon=float(eps), q=float(q), trials=int(trials),
                            delta_hat=delta_hat, rho_hat=rho_hat,
                            delta_se=delta_se, rho_se=rho_se)


@dataclass(frozen=True, eq=False)
class HeavyLightReport:
    epsilon: float
    q: float
    heavy: tuple[tuple[int, int], ...]
    light_edges: tuple[tuple[int, int], ...]
    light_pairs: tuple[tuple[int, int], ...]
    diff_h: float
    cost_l1: float
    cost_l2: float
    thresholds: tuple[float, float, float]
    event_g: bool

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "q": self.q,
            "heavy": [list(e) for e in self.heavy],
            "light_edges": [list(e) for e in self.light_edges],
            "light_pairs": [list(e) for e in self.light_pairs],
            "diff_h": self.diff_h,
            "cost_l1": self.cost_l1,
            "cost_l2": self.cost_l2,
            "thresholds": list(self.thresholds),
            "event_g": self.event_g,
        }


def heavy_light_report(w_orig: WeightedGraph, f_orig: Embedding, f_proj: Embedding,
                       eps: float, q: float, delta_hat: float, rho_hat: float,
                       matching_weight_orig: float) -> HeavyLightReport:
    """Classify edges/pairs by projected-vs-original weight ratio and test the
    three threshold inequalities (event_g).

    Pairs with original weight 0 are excluded: a linear map keeps them at 0,
    so the ratio is undefined and they contribute nothing to any sum. Pair
    sums (cost_l2 and its threshold) use unordered pairs.
    """
    g = w_orig.graph
    if f_orig.n != g.n or f_proj.n != g.n:
        raise ValueError("graph and embeddings disagree on the vertex count")
    if not (0 < eps < 0.1):
        raise ValueError(f"eps must lie in (0, 1/10), got {eps}")

    up, down = np.exp(eps * q), np.exp(-eps * q)
    w_edge = w_orig.weights
    w_edge_proj = edge_norms(g, f_proj) ** q
    positive = w_edge > 0

    heavy_mask = positive & (w_edge_proj >= up * w_edge)
    light_mask = positive & (w_edge_proj <= down * w_edge)
    heavy = tuple(e for e, hit in zip(g.edges, heavy_mask) if hit)
    light_edges = tuple(e for e, hit in zip(g.edges, light_mask) if hit)
    diff_h = float((w_edge_proj[heavy_mask] - up * w_edge[heavy_mask]).sum())
    cost_l1 = float(w_edge[light_mask].sum())

    pairs, w_pair = all_pair_weights(f_orig, q)
    _, w_pair_proj = all_pair_weights(f_proj, q)
    pair_positive = w_pair > 0
    light_pair_mask = pair_positive & (w_pair_proj <= down * w_pair)
    light_pairs = tuple((int(u), int(v)) for u, v in pairs[light_pair_mask])
    cost_l2 = float(w_pair[light_pair_mask].sum())
    pair_total = float(w_pair.sum())

    t_diff = np.sqrt(rho_hat) * (g.max_degree + 1) * matching_weight_orig
    t_l1 = np.sqrt(delta_hat) * (g.max_degree + 1) * matching_weight_orig
    t_l2 = np.sqrt(delta_hat) * pair_total
    event_g = bool(diff_h <= t_diff and cost_l1 <= t_l1 and cost_l2 <= t_l2)
    return HeavyLightReport(
        epsilon=float(eps), q=float(q), heavy=heavy, light_edges=light_edges,
        light_pairs=light_pairs, diff_h=diff_h, cost_l1=cost_l1, cost_l2=cost_l2,
        thresholds=(float(t_diff), float(t_l1), float(t_l2)), event_g=event_g,
    )
