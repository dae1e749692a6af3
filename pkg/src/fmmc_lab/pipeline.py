"""End-to-end experiments.

* lambda_eval: minimum vertex-cover total for squared-distance edge weights,
  normalized by the centered embedding's total squared norm. By LP duality the
  numerator equals the fractional matching number of the same weighted graph.
* theorem1 experiment: Monte-Carlo check that a random sub-Gaussian projection
  to d = ceil(mult * q * log(Delta/(eps q)) / eps^2) dimensions preserves the
  maximum matching weight, the fractional matching weight, and the total pair
  weight within e^{+-eps q}, with the heavy/light accounting per trial.
* theorem2 experiment: the same machinery at q = 2 driving the normalized
  cover value: fraction of trials with lambda(projected F) <= 2 lambda(F).
* run_full_pipeline: conductance + gap solver + experiments + bound-chain
  report in one reproducible JSON document.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conductance import bound_chain_report, vertex_conductance_exact
from .dimred import (apply_projector, estimate_goodness, heavy_light_report,
                     identity_projector, sample_projector)
from .graphs import (Embedding, Graph, center_embedding, gaussian_cloud, make_embedding,
                     total_pair_weight, weights_from_embedding)
from .matching import fractional_matching, max_matching_exact, min_vertex_cover_lp
from .spectral import fmmc_solve, jacobi_eigensystem
from .util import (DegenerateEmbedding, InstanceRejected, derive_seed, run_trials)

EPS_LO, EPS_HI = 0.0, 0.1
DEFAULT_GOODNESS_TRIALS = 2000


def dimension_for(delta: int, eps: float, q: float, multiplier: float) -> int:
    """Target dimension ceil(multiplier * q * log(Delta/(eps q)) / eps^2), natural
    log floored at 1 so small degrees never collapse the formula."""
    arg = max(delta, 1) / (eps * q)
    return max(1, math.ceil(multiplier * q * max(math.log(arg), 1.0) / (eps * eps)))


def graph_embedding(g: Graph, kind: str, seed: int = 0, points=None) -> Embedding:
    """Standard test embeddings: distinct basis vectors, bottom Laplacian
    eigenvectors, a seeded gaussian cloud, or explicit coordinates."""
    if kind == "basis":
        return Embedding(n=g.n, dim=g.n, points=np.eye(g.n))
    if kind == "spectral":
        if g.n < 2:
            raise ValueError("spectral embedding needs n >= 2")
        lap = np.diag(g.degrees().astype(np.float64)) - g.adjacency()
        _, vecs = jacobi_eigensystem(lap)
        ascending = vecs[:, ::-1]       # columns sorted by ascending eigenvalue
        return Embedding(n=g.n, dim=g.n - 1, points=ascending[:, 1:].copy())
    if kind == "gaussian":
        return gaussian_cloud(g.n, g.n, derive_seed(seed, 7))
    if kind == "points":
        f = make_embedding(points)
        if f.n != g.n:
            raise ValueError(f"embedding has {f.n} rows but graph has {g.n} vertices")
        return f
    raise ValueError(f"unknown embedding kind {kind!r}")


@dataclass(frozen=True)
class LambdaValue:
    value: float
    numerator: float      # vertex-cover total
    denominator: float    # sum of squared norms of the centered embedding
    dim: int

    def to_dict(self) -> dict:
        return {"value": self.value, "numerator": self.numerator,
                "denominator": self.denominator, "dim": self.dim}


def lambda_eval(g: Graph, f: Embedding) -> LambdaValue:
    """Normalized cover value at a fixed embedding: center f, build squared-distance
    edge weights, solve the cover LP exactly, divide by sum ||f(u)||^2."""
    fc = center_embedding(f)
    denom = float(np.einsum("ij,ij->", fc.points, fc.points))
    scale = float(np.abs(f.points).max(initial=0.0))
    if denom <= 1e-24 * max(1.0, scale * scale) * f.n:
        raise DegenerateEmbedding("all embedding points coincide; normalization is zero")
    w = weights_from_embedding(g, fc, 2.0)
    _, report = min_vertex_cover_lp(w)
    return LambdaValue(value=report.dual / denom, numerator=report.dual,
                       denominator=denom, dim=f.dim)


def _check_eps(eps: float) -> None:
    if not (EPS_LO < eps < EPS_HI):
        raise ValueError(f"eps must lie in (0, 1/10), got {eps}")


@dataclass(frozen=True)
class Theorem1Trial:
    trial: int
    seed: int
    matching_weight: float       # w_pi(M^pi)
    fractional_weight: float     # w_pi(M^pi_frac)
    pair_total: float
    event_g: bool
    matching_ok: bool
    fractional_ok: bool
    pair_total_ok: bool
    conditional_ok: bool | None  # sandwich inequalities, checked only under event_g

    def to_dict(self) -> dict:
        return {
            "trial": self.trial, "seed": self.seed,
            "matching_weight": self.matching_weight,
            "fractional_weight": self.fractional_weight,
            "pair_total": self.pair_total,
            "event_g": self.event_g,
            "matching_ok": self.matching_ok,
            "fractional_ok": self.fractional_ok,
            "pair_total_ok": self.pair_total_ok,
            "conditional_ok": self.conditional_ok,
        }


@dataclass(frozen=True)
class Theorem1Report:
    config: dict
    d: int
    reference: dict              # original-weight quantities
    goodness: dict | None
    trials: tuple[Theorem1Trial, ...]
    success_matching: float
    success_fractional: float
    success_pair_total: float
    event_g_frequency: float
    conditional_violations: int

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "d": self.d,
            "reference": self.reference,
            "goodness": self.goodness,
            "success": {
                "matching": self.success_matching,
                "fractional": self.success_fractional,
                "pair_total": self.success_pair_total,
            },
            "event_g_frequency": self.event_g_frequency,
            "conditional_violations": self.conditional_violations,
            "trials": [t.to_dict() for t in self.trials],
        }

    def all_success_min(self) -> float:
        return min(self.success_matching, self.success_fractional, self.success_pair_total)


def run_theorem1_experiment(g: Graph, f: Embedding, q: float, eps: float,
                            dim_multiplier: float, distribution: str, trials: int,
                            seed: int, goodness_trials: int = DEFAULT_GOODNESS_TRIALS,
                            d_override: int | None = None,
                            identity_projection: bool = False) -> Theorem1Report:
    """Per trial: sample a projector, project the embedding, re-solve the exact
    and fractional matchings under projected weights, total the pair weights,
    and classify heavy/light edges. Success means landing in [e^{-eps q} ref,
    e^{+eps q} ref] for each of the three reference quantities."""
    _check_eps(eps)
    if trials < 1:
        raise ValueError("need at least one trial")
    w = weights_from_embedding(g, f, q)
    _, matching_value = max_matching_exact(w)
    frac, _ = fractional_matching(w)
    pair_total_orig = total_pair_weight(f, q)
    up, down = math.exp(eps * q), math.exp(-eps * q)

    if identity_projection:
        d = f.dim
        goodness = None
        delta_ucb = rho_ucb = 0.0
    else:
        d = int(d_override) if d_override is not None else dimension_for(g.max_degree, eps, q, dim_multiplier)
        goodness = estimate_goodness(distribution, f.dim, d, eps, q, goodness_trials,
                                     derive_seed(seed, 1))
        delta_ucb, rho_ucb = goodness.delta_ucb, goodness.rho_ucb

    slack_up = up + math.sqrt(rho_ucb) * (g.max_degree + 1)
    slack_down = down - math.sqrt(delta_ucb) * (g.max_degree + 1)
    pair_slack_down = down - math.sqrt(delta_ucb)

    def one_trial(t: int) -> Theorem1Trial:
        trial_seed = derive_seed(seed, 2, t)
        proj = identity_projector(f.dim) if identity_projection else \
            sample_projector(f.dim, d, distribution, trial_seed)
        fp = apply_projector(proj, f)
        w_pi = weights_from_embedding(g, fp, q)
        _, m_pi = max_matching_exact(w_pi)
        frac_pi, _ = fractional_matching(w_pi)
        pair_pi = total_pair_weight(fp, q)
        hl = heavy_light_report(w, f, fp, eps, q, delta_ucb, rho_ucb, matching_value)
        conditional = None
        if hl.event_g:
            conditional = (
                m_pi <= slack_up * matching_value + 1e-9 * (1 + matching_value)
                and frac_pi.total_weight >= slack_down * frac.total_weight - 1e-9 * (1 + frac.total_weight)
                and pair_pi >= pair_slack_down * pair_total_orig - 1e-9 * (1 + pair_total_orig)
            )
        return Theorem1Trial(
            trial=t, seed=trial_seed,
            matching_weight=m_pi,
            fractional_weight=frac_pi.total_weight,
            pair_total=pair_pi,
            event_g=hl.event_g,
            matching_ok=bool(down * matching_value <= m_pi <= up * matching_value),
            fractional_ok=bool(down * frac.total_weight <= frac_pi.total_weight <= up * frac.total_weight),
            pair_total_ok=bool(down * pair_total_orig <= pair_pi <= up * pair_total_orig),
            conditional_ok=conditional,
        )

    records = tuple(run_trials(one_trial, trials))
    return Theorem1Report(
        config={"n": g.n, "delta": g.max_degree, "q": q, "eps": eps,
                "dim_multiplier": None if d_override is not None or identity_projection else dim_multiplier,
                "d_override": d_override, "identity_projection": identity_projection,
                "distribution": distribution, "trials": trials, "seed": seed,
                "goodness_trials": goodness_trials},
        d=d,
        reference={"matching_weight": matching_value, "fractional_weight": frac.total_weight,
                   "pair_total": pair_total_orig, "edge_total": w.total_edge_weight()},
        goodness=goodness.to_dict() if goodness is not None else None,
        trials=records,
        success_matching=sum(t.matching_ok for t in records) / trials,
        success_fractional=sum(t.fractional_ok for t in records) / trials,
        success_pair_total=sum(t.pair_total_ok for t in records) / trials,
        event_g_frequency=sum(t.event_g for t in records) / trials,
        conditional_violations=sum(1 for t in records if t.conditional_ok is False),
    )


def sweep_dim_multiplier(g: Graph, f: Embedding, q: float, eps: float,
                         multipliers: list[float], distribution: str, trials: int,
                         seed: int, target: float = 0.95,
                         goodness_trials: int = DEFAULT_GOODNESS_TRIALS):
    """Ascending sweep; stops at the first multiplier whose worst success rate
    meets the target. Returns (reports keyed by multiplier, passing multiplier or None)."""
    reports: list[tuple[float, Theorem1Report]] = []
    passing = None
    for i, mult in enumerate(sorted(multipliers)):
        rep = run_theorem1_experiment(g, f, q, eps, mult, distribution, trials,
                                      derive_seed(seed, 3, i), goodness_trials=goodness_trials)
        reports.append((mult, rep))
        if rep.all_success_min() >= target:
            passing = mult
            break
    return reports, passing


@dataclass(frozen=True)
class Theorem2Trial:
    trial: int
    seed: int
    lambda_proj: dict
    ratio_ok: bool            # lambda(pi F) <= 2 lambda(F)
    event_g: bool
    pair_total_proj: float
    norm_preserved: bool      # S' >= e^{-2 eps} S
    norm_preserved_slack: bool  # S' >= (e^{-2 eps} - sqrt(delta_hat)) S

    def to_dict(self) -> dict:
        return {"trial": self.trial, "seed": self.seed, "lambda_proj": self.lambda_proj,
                "ratio_ok": self.ratio_ok, "event_g": self.event_g,
                "pair_total_proj": self.pair_total_proj,
                "norm_preserved": self.norm_preserved,
                "norm_preserved_slack": self.norm_preserved_slack}


@dataclass(frozen=True)
class Theorem2Report:
    config: dict
    d: int
    lambda_base: dict
    pair_total_base: float
    goodness: dict
    trials: tuple[Theorem2Trial, ...]
    ratio_success: float
    event_g_frequency: float
    ratio_success_given_event_g: float | None
    event_g_norm_violations: int

    def to_dict(self) -> dict:
        return {
            "config": self.config, "d": self.d,
            "lambda_base": self.lambda_base,
            "pair_total_base": self.pair_total_base,
            "goodness": self.goodness,
            "ratio_success": self.ratio_success,
            "event_g_frequency": self.event_g_frequency,
            "ratio_success_given_event_g": self.ratio_success_given_event_g,
            "event_g_norm_violations": self.event_g_norm_violations,
            "trials": [t.to_dict() for t in self.trials],
        }


def run_theorem2_experiment(g: Graph, f: Embedding, eps: float = 0.01,
                            dim_multiplier: float = 1.0, distribution: str = "gaussian",
                            trials: int = 100, seed: int = 0,
                            goodness_trials: int = DEFAULT_GOODNESS_TRIALS) -> Theorem2Report:
    """Project the base embedding trials-many times at q = 2 and record how often
    the normalized cover value at most doubles, plus pair-total preservation
    under event_g."""
    _check_eps(eps)
    q = 2.0
    fc = center_embedding(f)
    lam_base = lambda_eval(g, fc)
    pair_base = total_pair_weight(fc, q)
    w = weights_from_embedding(g, fc, q)
    _, matching_value = max_matching_exact(w)
    d = dimension_for(g.max_degree, eps, q, dim_multiplier)
    goodness = estimate_goodness(distribution, fc.dim, d, eps, q, goodness_trials,
                                 derive_seed(seed, 1))
    down = math.exp(-eps * q)
    slack_down = down - math.sqrt(goodness.delta_ucb)

    def one_trial(t: int) -> Theorem2Trial:
        trial_seed = derive_seed(seed, 2, t)
        proj = sample_projector(fc.dim, d, distribution, trial_seed)
        fp = apply_projector(proj, fc)   # linear map keeps the points centered
        lam_pi = lambda_eval(g, fp)
        pair_pi = total_pair_weight(fp, q)
        hl = heavy_light_report(w, fc, fp, eps, q, goodness.delta_ucb, goodness.rho_ucb,
                                matching_value)
        return Theorem2Trial(
            trial=t, seed=trial_seed, lambda_proj=lam_pi.to_dict(),
            ratio_ok=bool(lam_pi.value <= 2.0 * lam_base.value),
            event_g=hl.event_g,
            pair_total_proj=pair_pi,
            norm_preserved=bool(pair_pi >= down * pair_base),
            norm_preserved_slack=bool(pair_pi >= slack_down * pair_base - 1e-9 * (1 + pair_base)),
        )

    records = tuple(run_trials(one_trial, trials))
    in_event = [t for t in records if t.event_g]
    return Theorem2Report(
        config={"n": g.n, "delta": g.max_degree, "eps": eps, "dim_multiplier": dim_multiplier,
                "distribution": distribution, "trials": trials, "seed": seed,
                "goodness_trials": goodness_trials},
        d=d,
        lambda_base=lam_base.to_dict(),
        pair_total_base=pair_base,
        goodness=goodness.to_dict(),
        trials=records,
        ratio_success=sum(t.ratio_ok for t in records) / trials,
        event_g_frequency=len(in_event) / trials,
        ratio_success_given_event_g=(sum(t.ratio_ok for t in in_event) / len(in_event)) if in_event else None,
        event_g_norm_violations=sum(1 for t in in_event if not t.norm_preserved),
    )


@dataclass
class PipelineConfig:
    seed: int = 0
    q: float = 2.0
    eps: float = 0.05
    theorem2_eps: float = 0.01
    dim_multiplier: float = 1.0
    distribution: str = "gaussian"
    trials: int = 50
    embedding: str = "basis"
    embedding_points: list | None = None
    goodness_trials: int = DEFAULT_GOODNESS_TRIALS
    fmmc_max_iters: int = 5000
    fmmc_step_schedule: str = "sqrt"
    fmmc_step_scale: float = 1.0
    run_conductance: bool = True
    run_fmmc: bool = True
    run_theorem1: bool = True
    run_theorem2: bool = True

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "q": self.q, "eps": self.eps,
            "theorem2_eps": self.theorem2_eps,
            "dim_multiplier": self.dim_multiplier, "distribution": self.distribution,
            "trials": self.trials, "embedding": self.embedding,
            "goodness_trials": self.goodness_trials,
            "fmmc_max_iters": self.fmmc_max_iters,
            "fmmc_step_schedule": self.fmmc_step_schedule,
            "fmmc_step_scale": self.fmmc_step_scale,
            "run_conductance": self.run_conductance, "run_fmmc": self.run_fmmc,
            "run_theorem1": self.run_theorem1, "run_theorem2": self.run_theorem2,
        }


def run_full_pipeline(g: Graph, config: PipelineConfig) -> dict:
    """Compose conductance, gap solver, both experiments, and the bound-chain
    report; components that reject the instance are recorded, not fatal."""
    doc: dict = {
        "config": config.to_dict(),
        "graph": {"n": g.n, "m": g.m, "max_degree": g.max_degree},
    }
    certificate = None
    if config.run_conductance:
        try:
            certificate = vertex_conductance_exact(g)
            doc["conductance"] = {"status": "ok", **certificate.to_dict()}
        except (InstanceRejected, ValueError) as exc:
            doc["conductance"] = {"status": "rejected", "reason": str(exc)}

    solver_chain = None
    fmmc_history = None
    if config.run_fmmc:
        try:
            result = fmmc_solve(g, max_iters=config.fmmc_max_iters,
                                step_schedule=config.fmmc_step_schedule,
                                step_scale=config.fmmc_step_scale, seed=config.seed)
            solver_chain = result.chain
            fmmc_history = result.history
            doc["fmmc"] = {
                "status": "ok",
                "summary": result.summary.to_dict(),
                "converged": result.converged,
                "iterations": result.iterations,
                "matrix": [[float(x) for x in row] for row in result.chain.entries],
            }
        except InstanceRejected as exc:
            doc["fmmc"] = {"status": "rejected", "reason": str(exc)}

    embedding = None
    if config.run_theorem1 or config.run_theorem2:
        embedding = graph_embedding(g, config.embedding, seed=config.seed,
                                    points=config.embedding_points)

    if config.run_theorem1:
        try:
            rep1 = run_theorem1_experiment(g, embedding, config.q, config.eps,
                                           config.dim_multiplier, config.distribution,
                                           config.trials, derive_seed(config.seed, 11),
                                           goodness_trials=config.goodness_trials)
            doc["theorem1"] = {"status": "ok", **rep1.to_dict()}
        except (InstanceRejected, ValueError) as exc:
            doc["theorem1"] = {"status": "rejected", "reason": str(exc)}

    if config.run_theorem2:
        try:
            rep2 = run_theorem2_experiment(g, embedding, eps=config.theorem2_eps,
                                           dim_multiplier=config.dim_multiplier,
                                           distribution=config.distribution,
                                           trials=config.trials,
                                           seed=derive_seed(config.seed, 12),
                                           goodness_trials=config.goodness_trials)
            doc["theorem2"] = {"status": "ok", **rep2.to_dict()}
        except (InstanceRejected, ValueError, DegenerateEmbedding) as exc:
            doc["theorem2"] = {"status": "rejected", "reason": str(exc)}

    if certificate is not None and solver_chain is not None:
        doc["bound_chain"] = {"status": "ok",
                              **bound_chain_report(g, solver_chain, certificate).to_dict()}
    else:
        doc["bound_chain"] = {"status": "skipped",
                              "reason": "needs both the conductance certificate and a solver gap"}
    if fmmc_history is not None:
        doc["fmmc"]["history"] = [list(row) for row in fmmc_history]
    return doc
