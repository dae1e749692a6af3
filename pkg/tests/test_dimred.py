import numpy as np
import pytest

from fmmc_lab import (apply_projector, estimate_goodness, gen_star_union, heavy_light_report,
                      sample_projector, weights_from_embedding)
from fmmc_lab.dimred import identity_projector
from fmmc_lab.graphs import build_graph, make_embedding
from fmmc_lab.matching import max_matching_exact
from fmmc_lab.util import derive_seed


def test_projector_determinism():
    a = sample_projector(16, 8, "gaussian", seed=123)
    b = sample_projector(16, 8, "gaussian", seed=123)
    assert np.array_equal(a.entries, b.entries)
    c = sample_projector(16, 8, "gaussian", seed=124)
    assert not np.array_equal(a.entries, c.entries)


def test_rademacher_support():
    p = sample_projector(10, 4, "rademacher", seed=7)
    assert set(np.unique(p.entries * np.sqrt(4))) <= {-1.0, 1.0}


def test_projector_rejections():
    with pytest.raises(ValueError):
        sample_projector(0, 4, "gaussian", seed=1)
    with pytest.raises(ValueError):
        sample_projector(4, 0, "gaussian", seed=1)
    with pytest.raises(ValueError):
        sample_projector(4, 4, "cauchy", seed=1)


def test_gaussian_entry_mean_clt():
    # mean of d*n i.i.d. N(0, 1/d) entries is within 4 sigma of 0
    p = sample_projector(16, 64, "gaussian", seed=99)
    cells = 16 * 64
    assert abs(p.entries.mean()) <= 4.0 / np.sqrt(cells * 64)


def test_apply_projector_linearity():
    p = sample_projector(6, 32, "gaussian", seed=5)
    zeros = make_embedding(np.zeros((4, 6)))
    assert np.all(apply_projector(p, zeros).points == 0.0)
    rng = np.random.default_rng(5)
    f = make_embedding(rng.normal(size=(4, 6)))
    doubled = make_embedding(2.0 * f.points)
    assert np.allclose(apply_projector(p, doubled).points,
                       2.0 * apply_projector(p, f).points, rtol=1e-12)
    with pytest.raises(ValueError):
        apply_projector(p, make_embedding(np.zeros((3, 5))))


def test_apply_projector_norm_concentration():
    # E ||pi x||^2 = ||x||^2 with Var = 2/d for gaussian entries; mean over
    # 10^4 fresh projectors lands within a 5 sigma band
    d, trials = 256, 10_000
    x = make_embedding(np.array([[1.0, 0.0, 0.0, 0.0]]))
    acc = np.empty(trials)
    for t in range(trials):
        p = sample_projector(4, d, "gaussian", seed=derive_seed(1000, t))
        acc[t] = (apply_projector(p, x).points ** 2).sum()
    band = 5.0 * np.sqrt(2.0 / d) / np.sqrt(trials)
    assert abs(acc.mean() - 1.0) <= band


def test_goodness_against_chi_square_oracle():
    stats = pytest.importorskip("scipy.stats")
    d, eps, trials = 2000, 0.1, 10_000
    est = estimate_goodness("gaussian", 16, d, eps, 2.0, trials, seed=42)
    delta_true = 1.0 - (stats.chi2.cdf(d * np.exp(2 * eps), d) - stats.chi2.cdf(d * np.exp(-2 * eps), d))
    se = max(np.sqrt(delta_true * (1 - delta_true) / trials), 3.0 / trials)
    assert abs(est.delta_hat - delta_true) <= 4 * se
    # band check: consistent with 2 exp(-d eps^2 c) for some c in [1/8, 1/2]
    assert est.delta_hat <= 2 * np.exp(-d * eps * eps / 8) + 4 * se
    assert est.delta_ucb >= 3.0 / trials


def test_goodness_wide_band_and_d1():
    stats = pytest.importorskip("scipy.stats")
    wide = estimate_goodness("gaussian", 8, 50, 1.0, 2.0, 2000, seed=43)
    assert wide.delta_hat <= 0.01
    est1 = estimate_goodness("gaussian", 8, 1, 0.05, 2.0, 10_000, seed=44)
    delta_true = 1.0 - (stats.chi2.cdf(np.exp(0.1), 1) - stats.chi2.cdf(np.exp(-0.1), 1))
    assert est1.delta_hat > 0.1
    assert abs(est1.delta_hat - delta_true) <= 4 * np.sqrt(delta_true * (1 - delta_true) / 10_000)


def test_goodness_rademacher_runs():
    est = estimate_goodness("rademacher", 12, 48, 0.09, 2.0, 500, seed=45)
    assert 0.0 <= est.delta_hat <= 1.0 and est.rho_hat >= 0.0


def test_goodness_preconditions():
    with pytest.raises(ValueError):
        estimate_goodness("gaussian", 8, 16, 0.05, 2.0, 50, seed=1)
    with pytest.raises(ValueError):
        estimate_goodness("gaussian", 8, 16, -0.1, 2.0, 500, seed=1)


def _star_instance(delta=3, k=2):
    g, f = gen_star_union(delta, k)
    w = weights_from_embedding(g, f, 2.0)
    _, m_val = max_matching_exact(w)
    return g, f, w, m_val


def test_heavy_light_identity_projection():
    g, f, w, m_val = _star_instance()
    rep = heavy_light_report(w, f, f, eps=0.05, q=2.0, delta_hat=0.0, rho_hat=0.0,
                             matching_weight_orig=m_val)
    assert rep.heavy == () and rep.light_edges == () and rep.light_pairs == ()
    assert rep.diff_h == 0.0 and rep.cost_l1 == 0.0 and rep.cost_l2 == 0.0
    assert rep.event_g


def test_heavy_light_single_edge_arithmetic():
    g = build_graph(2, [(0, 1)])
    f = make_embedding([[0.0], [1.0]])
    eps, q = 0.05, 2.0
    w = weights_from_embedding(g, f, q)
    scale = np.exp(2 * eps)  # distances scale by e^{2 eps}, so the weight becomes e^{2 eps q}
    fp = make_embedding(f.points * scale)
    rep = heavy_light_report(w, f, fp, eps, q, delta_hat=0.0, rho_hat=0.0,
                             matching_weight_orig=1.0)
    assert rep.heavy == ((0, 1),)
    # projected weight e^{2 eps q} against threshold e^{eps q}: excess is the difference
    assert rep.diff_h == pytest.approx(np.exp(2 * eps * q) - np.exp(eps * q), rel=1e-12)
    assert not rep.event_g  # thresholds are zero and diff_h > 0


def test_heavy_light_partition_and_l1_subset_l2():
    g, f, w, m_val = _star_instance(4, 3)
    rng = np.random.default_rng(50)
    p = sample_projector(f.dim, 3, "gaussian", seed=51)
    fp = apply_projector(p, f)
    rep = heavy_light_report(w, f, fp, 0.09, 2.0, 0.01, 0.01, m_val)
    heavy, light = set(rep.heavy), set(rep.light_edges)
    assert heavy.isdisjoint(light)
    assert all(e in set(g.edges) for e in heavy | light)
    assert light <= set(rep.light_pairs)
    # diff_h recomputed independently from raw weights
    wp = weights_from_embedding(g, fp, 2.0)
    expect = sum(max(wp.weights[i] - np.exp(0.18) * w.weights[i], 0.0)
                 for i in range(g.m) if wp.weights[i] >= np.exp(0.18) * w.weights[i])
    assert rep.diff_h == pytest.approx(expect, rel=1e-10, abs=1e-12)
    del rng


def test_heavy_light_zero_weight_pairs_excluded():
    g = build_graph(3, [(0, 1), (1, 2)])
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])  # vertices 0 and 2 coincide
    f = make_embedding(pts)
    w = weights_from_embedding(g, f, 2.0)
    shrunk = make_embedding(pts * 0.5)
    rep = heavy_light_report(w, f, shrunk, 0.05, 2.0, 0.0, 0.0, 1.0)
    assert (0, 2) not in rep.light_pairs  # zero-weight pair stays out
    assert set(rep.light_edges) == {(0, 1), (1, 2)}


def test_heavy_light_determinism():
    g, f, w, m_val = _star_instance()
    p = sample_projector(f.dim, 5, "gaussian", seed=52)
    fp = apply_projector(p, f)
    a = heavy_light_report(w, f, fp, 0.05, 2.0, 0.01, 0.01, m_val)
    b = heavy_light_report(w, f, fp, 0.05, 2.0, 0.01, 0.01, m_val)
    assert a.to_dict() == b.to_dict()


def test_heavy_light_serialization_field_names():
    g, f, w, m_val = _star_instance()
    rep = heavy_light_report(w, f, f, 0.05, 2.0, 0.0, 0.0, m_val)
    d = rep.to_dict()
    assert {"epsilon", "q", "heavy", "light_edges", "light_pairs",
            "diff_h", "cost_l1", "cost_l2", "event_g"} <= set(d)


def test_expectation_bounds_over_fresh_projectors():
    # moderate d so heavy/light events actually occur
    eps, q, d, trials = 0.09, 2.0, 60, 400
    g, f, w, m_val = _star_instance(3, 2)
    est = estimate_goodness("gaussian", f.dim, d, eps, q, 20_000, seed=60)
    diffs, cost1s, cost2s = [], [], []
    for t in range(trials):
        p = sample_projector(f.dim, d, "gaussian", seed=derive_seed(61, t))
        fp = apply_projector(p, f)
        rep = heavy_light_report(w, f, fp, eps, q, est.delta_ucb, est.rho_ucb, m_val)
        diffs.append(rep.diff_h)
        cost1s.append(rep.cost_l1)
        cost2s.append(rep.cost_l2)
    edge_total = w.total_edge_weight()
    pair_total = 2.0 * 28  # 8 vertices, all pairs distinct basis vectors of weight 2
    for samples, bound in [(diffs, est.rho_hat * edge_total),
                           (cost1s, est.delta_hat * edge_total),
                           (cost2s, est.delta_hat * pair_total)]:
        arr = np.array(samples)
        se = arr.std(ddof=1) / np.sqrt(trials)
        assert arr.mean() <= bound + 4 * se


def test_matching_decomposition_bound_on_star():
    g, f, w, m_val = _star_instance(8, 4)
    assert m_val >= w.total_edge_weight() / (g.max_degree + 1) - 1e-12


def test_event_g_frequency_matches_fitted_rate():
    # star union at the dimension the preservation experiment would use
    from fmmc_lab.pipeline import dimension_for
    eps, q = 0.09, 2.0
    g, f = gen_star_union(8, 4)
    w = weights_from_embedding(g, f, q)
    _, m_val = max_matching_exact(w)
    d = dimension_for(g.max_degree, eps, q, 1.0)
    est = estimate_goodness("gaussian", f.dim, d, eps, q, 4000, seed=70)
    trials = 200
    hits = 0
    for t in range(trials):
        p = sample_projector(f.dim, d, "gaussian", seed=derive_seed(71, t))
        fp = apply_projector(p, f)
        rep = heavy_light_report(w, f, fp, eps, q, est.delta_ucb, est.rho_ucb, m_val)
        hits += rep.event_g
    c_fit = -np.log(est.delta_ucb) / (eps * eps * d)
    assert hits / trials >= 1.0 - 3.0 * np.exp(-c_fit * eps * eps * d / 2.0)


def test_identity_projector_hook():
    p = identity_projector(5)
    f = make_embedding(np.random.default_rng(0).normal(size=(3, 5)))
    assert np.array_equal(apply_projector(p, f).points, f.points)
