"""Handlers mapping request models to core calls; shared by the HTTP app and the CLI."""
from __future__ import annotations

from . import pipeline as pl
from .conductance import vertex_conductance_exact
from .graphs import Graph, build_graph, gen_family, gen_star_union
from .schemas import (ConductanceRequest, ConductanceResponse, EmbeddingSource, FmmcRequest,
                      FmmcResponse, GraphSource, PipelineRequest, PipelineResponse,
                      Theorem1Request, Theorem1Response, Theorem2Request, Theorem2Response)
from .spectral import fmmc_solve


def resolve_graph(src: GraphSource) -> Graph:
    if src.kind == "family":
        if src.family is None or src.size is None:
            raise ValueError("family graphs need `family` and `size`")
        return gen_family(src.family, src.size)
    if src.kind == "star_union":
        if src.delta is None or src.k is None:
            raise ValueError("star unions need `delta` and `k`")
        g, _ = gen_star_union(src.delta, src.k)
        return g
    if src.n is None or src.edges is None:
        raise ValueError("edge-list graphs need `n` and `edges`")
    return build_graph(src.n, src.edges)


def resolve_embedding(g: Graph, src: EmbeddingSource, seed: int):
    return pl.graph_embedding(g, src.kind, seed=seed, points=src.points)


def handle_theorem1(req: Theorem1Request) -> Theorem1Response:
    g = resolve_graph(req.graph)
    f = resolve_embedding(g, req.embedding, req.seed)
    if req.sweep:
        reports, passing = pl.sweep_dim_multiplier(
            g, f, req.q, req.eps, req.sweep, req.distribution, req.trials, req.seed,
            goodness_trials=req.goodness_trials)
        _, last = reports[-1]
        return Theorem1Response(
            d=last.d,
            success={"matching": last.success_matching, "fractional": last.success_fractional,
                     "pair_total": last.success_pair_total},
            event_g_frequency=last.event_g_frequency,
            conditional_violations=last.conditional_violations,
            report=last.to_dict(),
            sweep=[{"multiplier": m, **r.to_dict()} for m, r in reports],
            passing_multiplier=passing,
        )
    rep = pl.run_theorem1_experiment(g, f, req.q, req.eps, req.dim_multiplier,
                                     req.distribution, req.trials, req.seed,
                                     goodness_trials=req.goodness_trials)
    return Theorem1Response(
        d=rep.d,
        success={"matching": rep.success_matching, "fractional": rep.success_fractional,
                 "pair_total": rep.success_pair_total},
        event_g_frequency=rep.event_g_frequency,
        conditional_violations=rep.conditional_violations,
        report=rep.to_dict(),
    )


def handle_theorem2(req: Theorem2Request) -> Theorem2Response:
    g = resolve_graph(req.graph)
    f = resolve_embedding(g, req.embedding, req.seed)
    rep = pl.run_theorem2_experiment(g, f, eps=req.eps, dim_multiplier=req.dim_multiplier,
                                     distribution=req.distribution, trials=req.trials,
                                     seed=req.seed, goodness_trials=req.goodness_trials)
    return Theorem2Response(
        d=rep.d,
        ratio_success=rep.ratio_success,
        event_g_frequency=rep.event_g_frequency,
        event_g_norm_violations=rep.event_g_norm_violations,
        report=rep.to_dict(),
    )


def handle_fmmc(req: FmmcRequest) -> FmmcResponse:
    g = resolve_graph(req.graph)
    result = fmmc_solve(g, max_iters=req.max_iters, step_schedule=req.step_schedule,
                        step_scale=req.step_scale, seed=req.seed)
    return FmmcResponse(
        gap=result.summary.gap,
        slem=result.summary.slem,
        converged=result.converged,
        iterations=result.iterations,
        summary=result.summary.to_dict(),
        matrix=[[float(x) for x in row] for row in result.chain.entries],
        history=[[float(x) for x in row] for row in result.history],
    )


def handle_conductance(req: ConductanceRequest) -> ConductanceResponse:
    g = resolve_graph(req.graph)
    cert = vertex_conductance_exact(g)
    d = cert.to_dict()
    return ConductanceResponse(psi_star=d["psi_star"], witness=d["witness"],
                               boundary_size=d["boundary_size"])


def handle_pipeline(req: PipelineRequest) -> PipelineResponse:
    g = resolve_graph(req.graph)
    config = pl.PipelineConfig(
        seed=req.seed, q=req.q, eps=req.eps, theorem2_eps=req.theorem2_eps,
        dim_multiplier=req.dim_multiplier,
        distribution=req.distribution, trials=req.trials,
        embedding=req.embedding.kind, embedding_points=req.embedding.points,
        goodness_trials=req.goodness_trials,
        fmmc_max_iters=req.fmmc_max_iters,
        fmmc_step_schedule=req.fmmc_step_schedule,
        fmmc_step_scale=req.fmmc_step_scale,
        run_conductance=req.run_conductance, run_fmmc=req.run_fmmc,
        run_theorem1=req.run_theorem1, run_theorem2=req.run_theorem2,
    )
    return PipelineResponse(document=pl.run_full_pipeline(g, config))
