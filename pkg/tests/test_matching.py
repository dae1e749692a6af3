import numpy as np
import pytest

from helpers import brute_max_matching, random_corpus

from fmmc_lab import (WeightedGraph, build_graph, fractional_matching,
                      fractional_matching_oracle, gen_family, max_matching_exact,
                      min_vertex_cover_lp)
from fmmc_lab.util import CapExceeded


def unit_graph(n, edges):
    g = build_graph(n, edges)
    return WeightedGraph(graph=g, weights=np.ones(g.m))


def test_single_edge():
    w = unit_graph(2, [(0, 1)])
    fm, rep = fractional_matching(w)
    assert rep.status == "optimal"
    assert rep.primal == pytest.approx(1.0, abs=1e-12)
    assert fm.values[0] == pytest.approx(1.0, abs=1e-12)
    cover, crep = min_vertex_cover_lp(w)
    assert crep.dual == pytest.approx(1.0, abs=1e-12)
    assert cover.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_triangle_half_integral():
    w = unit_graph(3, [(0, 1), (1, 2), (0, 2)])
    # oracle first: enumeration over {0, 1/2, 1}^3
    assert fractional_matching_oracle(w) == pytest.approx(1.5, abs=1e-15)
    fm, rep = fractional_matching(w)
    assert rep.primal == pytest.approx(1.5, abs=1e-9)
    assert np.allclose(fm.values, 0.5, atol=1e-9)   # all vertex constraints tight
    cover, _ = min_vertex_cover_lp(w)
    assert cover.total == pytest.approx(1.5, abs=1e-9)
    assert np.allclose(cover.values, 0.5, atol=1e-9)


def test_star_center_cap():
    w = unit_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert fractional_matching(w)[1].primal == pytest.approx(1.0, abs=1e-9)
    assert fractional_matching_oracle(w) == pytest.approx(1.0, abs=1e-15)


def test_cycle5_oracle():
    w = unit_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    assert fractional_matching_oracle(w) == pytest.approx(2.5, abs=1e-15)
    assert fractional_matching(w)[1].primal == pytest.approx(2.5, abs=1e-9)


def test_empty_edge_set():
    g = build_graph(4, [])
    w = WeightedGraph(graph=g, weights=np.zeros(0))
    fm, rep = fractional_matching(w)
    assert rep.primal == 0.0 and rep.dual == 0.0 and rep.status == "optimal"
    cover, _ = min_vertex_cover_lp(w)
    assert cover.total == 0.0 and np.all(cover.values == 0.0)


def test_all_zero_weights():
    g = build_graph(3, [(0, 1), (1, 2)])
    w = WeightedGraph(graph=g, weights=np.zeros(2))
    assert fractional_matching(w)[1].primal == 0.0
    assert max_matching_exact(w) == ([], 0.0)


def test_exact_matcher_path_131():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    w = WeightedGraph(graph=g, weights=np.array([1.0, 3.0, 1.0]))
    # oracle first: brute force over all 2^3 edge subsets
    assert brute_max_matching(w) == pytest.approx(3.0, abs=0)
    edges, value = max_matching_exact(w)
    assert edges == [(1, 2)] and value == pytest.approx(3.0, abs=0)


def test_exact_matcher_trivia():
    w = unit_graph(2, [(0, 1)])
    assert max_matching_exact(w) == ([(0, 1)], 1.0)
    empty = WeightedGraph(graph=build_graph(3, []), weights=np.zeros(0))
    assert max_matching_exact(empty) == ([], 0.0)


def test_exact_matcher_forest_dp_vs_brute():
    rng = np.random.default_rng(10)
    for _ in range(20):
        n = int(rng.integers(2, 12))
        # random forest: attach each vertex to a random earlier one, drop some edges
        edges = [(int(rng.integers(0, v)), v) for v in range(1, n) if rng.random() < 0.8]
        if not edges:
            continue
        g = build_graph(n, edges)
        w = WeightedGraph(graph=g, weights=rng.uniform(0, 1, g.m))
        _, value = max_matching_exact(w)
        assert value == pytest.approx(brute_max_matching(w), abs=1e-12)


def test_exact_matcher_bb_vs_brute():
    for w in random_corpus(40, seed=11):
        edges, value = max_matching_exact(w)
        assert value == pytest.approx(brute_max_matching(w), abs=1e-12)
        used = [v for e in edges for v in e]
        assert len(used) == len(set(used))


def test_exact_matcher_cap():
    g = gen_family("complete", 12)  # 66 edges, max degree 11: no admissible route
    w = WeightedGraph(graph=g, weights=np.ones(g.m))
    with pytest.raises(CapExceeded):
        max_matching_exact(w)


def test_exact_matcher_large_forest_allowed():
    # star unions exceed the branch-and-bound cap but are forests, so the DP runs
    from fmmc_lab import gen_star_union, weights_from_embedding
    g, f = gen_star_union(64, 2)
    w = weights_from_embedding(g, f, 2.0)
    edges, value = max_matching_exact(w)
    assert value == pytest.approx(4.0, abs=1e-12)
    assert len(edges) == 2


def test_oracle_cap():
    g = gen_family("path", 16)
    w = WeightedGraph(graph=g, weights=np.ones(g.m))
    with pytest.raises(CapExceeded):
        fractional_matching_oracle(w)


def test_corpus_duality_and_oracle():
    for w in random_corpus(60, seed=12):
        fm, rep = fractional_matching(w)
        cover, crep = min_vertex_cover_lp(w)
        assert rep.status == "optimal"
        # weak duality for the returned feasible pair
        assert fm.total_weight <= cover.total + 1e-8 * (1 + cover.total)
        # strong duality
        assert abs(rep.primal - rep.dual) <= 1e-8 * (1 + abs(rep.primal))
        # oracle equivalence
        assert rep.primal == pytest.approx(fractional_matching_oracle(w), abs=1e-8)
        # feasibility of both solutions
        sums = np.zeros(w.graph.n)
        for h, (u, v) in zip(fm.values, w.graph.edges):
            assert -1e-12 <= h <= 1 + 1e-12
            sums[u] += h
            sums[v] += h
        assert sums.max(initial=0.0) <= 1 + 1e-9
        for (u, v), wt in zip(w.graph.edges, w.weights):
            assert cover.values[u] + cover.values[v] >= wt - 1e-9


def test_corpus_sandwich_and_scaling():
    for w in random_corpus(25, seed=13):
        _, exact = max_matching_exact(w)
        frac, rep = fractional_matching(w)
        assert exact <= rep.primal + 1e-8
        assert rep.primal <= 2 * exact + 1e-8   # half-integrality
        scaled = WeightedGraph(graph=w.graph, weights=w.weights * 3.5)
        _, exact_s = max_matching_exact(scaled)
        _, rep_s = fractional_matching(scaled)
        assert exact_s == pytest.approx(3.5 * exact, rel=1e-10, abs=1e-12)
        assert rep_s.primal == pytest.approx(3.5 * rep.primal, rel=1e-10, abs=1e-12)


def test_corpus_decomposition_bound():
    for w in random_corpus(40, seed=14):
        _, rep = fractional_matching(w)
        bound = w.total_edge_weight() / (w.graph.max_degree + 1)
        assert rep.primal >= bound - 1e-9 * (1 + bound)


def test_report_serialization():
    w = unit_graph(2, [(0, 1)])
    _, rep = fractional_matching(w)
    d = rep.to_dict()
    assert set(d) == {"primal", "dual", "iterations", "status"}
