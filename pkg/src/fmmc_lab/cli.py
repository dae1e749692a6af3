"""Command-line client. Parses flags into the service request models, runs the
shared handlers in-process, and writes the JSON/CSV artifacts.

Exit codes: 0 success, 2 instance rejected (caps, bad input), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

from . import service
from .graphs import read_embedding, read_graph
from .schemas import (ConductanceRequest, EmbeddingSource, FmmcRequest, GraphSource,
                      PipelineRequest, Theorem1Request, Theorem2Request)
from .util import InstanceRejected, NumericalFailure, dump_json, write_csv

HISTORY_HEADER = ("iter", "mu", "gap", "step")


def _add_graph_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", metavar="FILE", help="graph file: 'n m' header then edge lines 'u v'")
    src.add_argument("--family", metavar="KIND:SIZE", help="path|cycle|complete|hypercube, e.g. cycle:8")
    src.add_argument("--star-union", metavar="DELTA:K", help="k disjoint stars with delta leaves each")


def _add_experiment_flags(p: argparse.ArgumentParser, trials_default: int) -> None:
    p.add_argument("--embedding", default="basis",
                   help="basis | spectral | gaussian | csv:PATH (default: basis)")
    p.add_argument("--eps", type=float, default=0.05)
    p.add_argument("--dim-multiplier", type=float, default=1.0)
    p.add_argument("--dist", choices=("gaussian", "rademacher"), default="gaussian")
    p.add_argument("--trials", type=int, default=trials_default)
    p.add_argument("--goodness-trials", type=int, default=2000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fmmc-lab",
                                     description="matching-preserving dimension reduction and "
                                                 "fastest-mixing-chain workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    t1 = sub.add_parser("theorem1", help="matching/pair-weight preservation experiment")
    _add_graph_flags(t1)
    _add_experiment_flags(t1, trials_default=200)
    t1.add_argument("--q", type=float, default=2.0)
    t1.add_argument("--sweep", metavar="M1,M2,...", help="sweep dimension multipliers, ascending")

    t2 = sub.add_parser("theorem2", help="normalized-cover ratio experiment (q = 2)")
    _add_graph_flags(t2)
    _add_experiment_flags(t2, trials_default=100)
    t2.set_defaults(eps=0.01)

    fm = sub.add_parser("fmmc", help="maximize the spectral gap over chains on the graph")
    _add_graph_flags(fm)
    fm.add_argument("--max-iters", type=int, default=5000)
    fm.add_argument("--step-schedule", choices=("sqrt", "geometric"), default="sqrt")
    fm.add_argument("--step-scale", type=float, default=1.0)

    cond = sub.add_parser("conductance", help="exact vertex conductance with witness")
    _add_graph_flags(cond)

    pipe = sub.add_parser("pipeline", help="full report: conductance, gap solver, experiments")
    _add_graph_flags(pipe)
    _add_experiment_flags(pipe, trials_default=50)
    pipe.add_argument("--q", type=float, default=2.0)
    pipe.add_argument("--theorem2-eps", type=float, default=0.01)
    pipe.add_argument("--components", metavar="LIST",
                      help="comma list from {conductance,fmmc,theorem1,theorem2}; default all")
    pipe.add_argument("--fmmc-max-iters", type=int, default=5000)
    pipe.add_argument("--fmmc-step-schedule", choices=("sqrt", "geometric"), default="sqrt")
    pipe.add_argument("--fmmc-step-scale", type=float, default=1.0)

    serve = sub.add_parser("serve", help="run the HTTP service (uvicorn)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    for p in (t1, t2, fm, cond, pipe):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="PATH", help="write the JSON report here (default: stdout)")
        p.add_argument("--csv", metavar="PATH", help="write the solver history CSV here")
    return parser


def _graph_source(args) -> GraphSource:
    if args.graph:
        g = read_graph(args.graph)
        return GraphSource(kind="edges", n=g.n, edges=list(g.edges))
    if args.family:
        kind, _, size = args.family.partition(":")
        return GraphSource(kind="family", family=kind, size=int(size))
    delta, _, k = args.star_union.partition(":")
    return GraphSource(kind="star_union", delta=int(delta), k=int(k))


def _embedding_source(args) -> EmbeddingSource:
    spec = getattr(args, "embedding", "basis")
    if spec.startswith("csv:"):
        f = read_embedding(spec[4:])
        return EmbeddingSource(kind="points", points=[list(row) for row in f.points])
    if spec in ("basis", "spectral", "gaussian"):
        return EmbeddingSource(kind=spec)
    raise ValueError(f"unknown embedding spec {spec!r}; use basis|spectral|gaussian|csv:PATH")


def _emit(payload: dict, args, history=None) -> None:
    text = dump_json(payload, args.out)
    if args.out is None:
        sys.stdout.write(text)
    if args.csv:
        if history is None:
            raise ValueError("--csv applies only to commands that produce a solver history")
        write_csv(history, HISTORY_HEADER, args.csv)


def _dispatch(args) -> None:
    if args.command == "serve":
        import uvicorn

        from .app import app
        uvicorn.run(app, host=args.host, port=args.port)
        return

    graph = _graph_source(args)
    if args.command == "theorem1":
        req = Theorem1Request(
            graph=graph, embedding=_embedding_source(args), q=args.q, eps=args.eps,
            dim_multiplier=args.dim_multiplier, distribution=args.dist, trials=args.trials,
            seed=args.seed, goodness_trials=args.goodness_trials,
            sweep=[float(x) for x in args.sweep.split(",")] if args.sweep else None)
        _emit(service.handle_theorem1(req).model_dump(), args)
    elif args.command == "theorem2":
        req = Theorem2Request(
            graph=graph, embedding=_embedding_source(args), eps=args.eps,
            dim_multiplier=args.dim_multiplier, distribution=args.dist, trials=args.trials,
            seed=args.seed, goodness_trials=args.goodness_trials)
        _emit(service.handle_theorem2(req).model_dump(), args)
    elif args.command == "fmmc":
        req = FmmcRequest(graph=graph, max_iters=args.max_iters,
                          step_schedule=args.step_schedule, step_scale=args.step_scale,
                          seed=args.seed)
        resp = service.handle_fmmc(req)
        _emit(resp.model_dump(), args,
              history=[(int(r[0]), r[1], r[2], r[3]) for r in resp.history])
    elif args.command == "conductance":
        _emit(service.handle_conductance(ConductanceRequest(graph=graph)).model_dump(), args)
    elif args.command == "pipeline":
        components = args.components.split(",") if args.components else None

        def on(name: str) -> bool:
            return components is None or name in components

        req = PipelineRequest(
            graph=graph, embedding=_embedding_source(args), seed=args.seed, q=args.q,
            eps=args.eps, theorem2_eps=args.theorem2_eps,
            dim_multiplier=args.dim_multiplier, distribution=args.dist,
            trials=args.trials, goodness_trials=args.goodness_trials,
            fmmc_max_iters=args.fmmc_max_iters,
            fmmc_step_schedule=args.fmmc_step_schedule,
            fmmc_step_scale=args.fmmc_step_scale,
            run_conductance=on("conductance"), run_fmmc=on("fmmc"),
            run_theorem1=on("theorem1"), run_theorem2=on("theorem2"))
        doc = service.handle_pipeline(req).document
        history = None
        if doc.get("fmmc", {}).get("status") == "ok":
            history = [(int(r[0]), r[1], r[2], r[3]) for r in doc["fmmc"]["history"]]
        _emit(doc, args, history=history)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except (InstanceRejected, ValueError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
