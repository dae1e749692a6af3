"""Request/response models for the HTTP service; the CLI builds the same models."""
from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class GraphSource(BaseModel):
    kind: Literal["family", "star_union", "edges"]
    family: Optional[str] = None        # path | cycle | complete | hypercube
    size: Optional[int] = None
    delta: Optional[int] = None
    k: Optional[int] = None
    n: Optional[int] = None
    edges: Optional[list[tuple[int, int]]] = None


class EmbeddingSource(BaseModel):
    kind: Literal["basis", "spectral", "gaussian", "points"] = "basis"
    points: Optional[list[list[float]]] = None


class Theorem1Request(BaseModel):
    graph: GraphSource
    embedding: EmbeddingSource = Field(default_factory=EmbeddingSource)
    q: float = 2.0
    eps: float = 0.05
    dim_multiplier: float = 1.0
    distribution: Literal["gaussian", "rademacher"] = "gaussian"
    trials: int = 200
    seed: int = 0
    goodness_trials: int = 2000
    sweep: Optional[list[float]] = None   # multipliers; overrides dim_multiplier


class Theorem1Response(BaseModel):
    d: int
    success: dict[str, float]
    event_g_frequency: float
    conditional_violations: int
    report: dict[str, Any]
    sweep: Optional[list[dict[str, Any]]] = None
    passing_multiplier: Optional[float] = None


class Theorem2Request(BaseModel):
    graph: GraphSource
    embedding: EmbeddingSource = Field(default_factory=EmbeddingSource)
    eps: float = 0.01
    dim_multiplier: float = 1.0
    distribution: Literal["gaussian", "rademacher"] = "gaussian"
    trials: int = 100
    seed: int = 0
    goodness_trials: int = 2000


class Theorem2Response(BaseModel):
    d: int
    ratio_success: float
    event_g_frequency: float
    event_g_norm_violations: int
    report: dict[str, Any]


class FmmcRequest(BaseModel):
    graph: GraphSource
    max_iters: int = 5000
    step_schedule: Literal["sqrt", "geometric"] = "sqrt"
    step_scale: float = 1.0
    seed: int = 0


class FmmcResponse(BaseModel):
    gap: float
    slem: float
    converged: bool
    iterations: int
    summary: dict[str, Any]
    matrix: list[list[float]]
    history: list[list[float]]   # rows (iter, mu, gap, step)


class ConductanceRequest(BaseModel):
    graph: GraphSource


class ConductanceResponse(BaseModel):
    psi_star: dict[str, Any]
    witness: list[int]
    boundary_size: int


class PipelineRequest(BaseModel):
    graph: GraphSource
    embedding: EmbeddingSource = Field(default_factory=EmbeddingSource)
    seed: int = 0
    q: float = 2.0
    eps: float = 0.05
    theorem2_eps: float = 0.01
    dim_multiplier: float = 1.0
    distribution: Literal["gaussian", "rademacher"] = "gaussian"
    trials: int = 50
    goodness_trials: int = 2000
    fmmc_max_iters: int = 5000
    fmmc_step_schedule: Literal["sqrt", "geometric"] = "sqrt"
    fmmc_step_scale: float = 1.0
    run_conductance: bool = True
    run_fmmc: bool = True
    run_theorem1: bool = True
    run_theorem2: bool = True


class PipelineResponse(BaseModel):
    document: dict[str, Any]


class ErrorBody(BaseModel):
    error: str
    detail: str
